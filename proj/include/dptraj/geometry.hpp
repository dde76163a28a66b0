#pragma once

#include <cmath>
#include <stdexcept>

namespace dptraj {

/// Planar location in abstract dataset units. No geodesic correction.
struct Point {
    double x = 0.0;
    double y = 0.0;

    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// Axis-aligned bounding box, xmin < xmax and ymin < ymax.
struct BoundingBox {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 1.0;
    double ymax = 1.0;

    bool valid() const {
        return std::isfinite(xmin) && std::isfinite(ymin) && std::isfinite(xmax) &&
               std::isfinite(ymax) && xmin < xmax && ymin < ymax;
    }

    bool contains(const Point& p) const {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double diagonal() const { return std::hypot(width(), height()); }
};

/// Closed rectangle of a grid leaf. Point membership during lookup is
/// half-open [x0,x1) x [y0,y1); the grid's global max edges are closed.
struct CellRect {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 0.0;
    double y1 = 0.0;

    Point centroid() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }

    /// Closed-rectangle intersection test (shared edges and corners count).
    bool touches(const CellRect& o) const {
        return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1;
    }
};

}  // namespace dptraj
