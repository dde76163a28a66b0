#include "dptraj/dataset_io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace dptraj {

namespace {

bool parse_double(std::string_view text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

Point parse_point(std::string_view token, std::size_t line_no) {
    const std::size_t comma = token.find(',');
    if (comma == std::string_view::npos) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": expected x,y point, got '" + std::string(token) + "'");
    }
    Point p;
    if (!parse_double(token.substr(0, comma), p.x) ||
        !parse_double(token.substr(comma + 1), p.y) || !p.finite()) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": malformed coordinate in '" + std::string(token) + "'");
    }
    return p;
}

void format_double(std::string& out, double v) {
    char buf[32];
    // %.17g round-trips doubles exactly and is byte-stable for equal values.
    const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
    out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

TrajectoryDataset read_dataset(std::istream& in) {
    TrajectoryDataset d;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        Trajectory t;
        std::size_t pos = 0;
        while (pos < line.size()) {
            std::size_t end = line.find(' ', pos);
            if (end == std::string::npos) {
                end = line.size();
            }
            if (end > pos) {
                t.points.push_back(parse_point(std::string_view(line).substr(pos, end - pos), line_no));
            }
            pos = end + 1;
        }
        if (t.points.empty()) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": empty trajectory");
        }
        d.trajectories.push_back(std::move(t));
    }
    if (d.trajectories.empty()) {
        throw std::runtime_error("dataset file contains no trajectories");
    }
    d.bbox = tight_bbox(d.trajectories);
    return d;
}

TrajectoryDataset read_dataset_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset file: " + path);
    }
    try {
        return read_dataset(in);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_dataset(std::ostream& out, const TrajectoryDataset& d) {
    std::string line;
    for (const Trajectory& t : d.trajectories) {
        line.clear();
        for (std::size_t i = 0; i < t.points.size(); ++i) {
            if (i > 0) {
                line.push_back(' ');
            }
            format_double(line, t.points[i].x);
            line.push_back(',');
            format_double(line, t.points[i].y);
        }
        line.push_back('\n');
        out << line;
    }
}

void write_text_file(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        fs::create_directories(target.parent_path());
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write file: " + tmp.string());
        }
        out << contents;
        if (!out.flush()) {
            throw std::runtime_error("write failed: " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

void write_dataset_file(const std::string& path, const TrajectoryDataset& d) {
    std::ostringstream out;
    write_dataset(out, d);
    write_text_file(path, out.str());
}

}  // namespace dptraj
