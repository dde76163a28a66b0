#pragma once

#include <iosfwd>
#include <string>

#include "dptraj/trajectory.hpp"

namespace dptraj {

// Trajectory file format: UTF-8 text, one trajectory per line, points as
// "x,y" pairs separated by single spaces, e.g.
//   0.12,0.98 0.15,0.95
// Blank lines and lines starting with '#' are ignored. Coordinates are
// written with enough digits to round-trip doubles exactly.

TrajectoryDataset read_dataset(std::istream& in);
TrajectoryDataset read_dataset_file(const std::string& path);

void write_dataset(std::ostream& out, const TrajectoryDataset& d);

/// Writes to a temporary file in the target directory, then renames.
void write_dataset_file(const std::string& path, const TrajectoryDataset& d);

/// Atomic text-file write used for all pipeline outputs.
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace dptraj
