#pragma once

#include <array>
#include <compare>

namespace mr2 {

/// Axis-aligned box in corner form, pixel units.
struct BBox {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    double width() const { return x2 - x1; }
    double height() const { return y2 - y1; }
    double area() const;
    double center_x() const { return 0.5 * (x1 + x2); }
    double center_y() const { return 0.5 * (y1 + y2); }

    /// Finite coordinates with x1 <= x2 and y1 <= y2.
    bool valid() const;

    bool operator==(const BBox&) const = default;
};

struct Resolution {
    int width = 0;
    int height = 0;

    auto operator<=>(const Resolution&) const = default;
};

/// Intersection over union. Returns 0 when the union is empty.
double iou(const BBox& a, const BBox& b);

/// Scales each axis independently from one image resolution to another.
/// Throws std::invalid_argument for a non-positive source or target resolution.
BBox rescale_bbox(const BBox& box, Resolution from, Resolution to);

/// Center / aspect / height parameterization used by the Kalman filter.
struct Xyah {
    double cx = 0.0;
    double cy = 0.0;
    double aspect = 0.0;  // width / height
    double height = 0.0;
};

Xyah to_xyah(const BBox& box);
BBox from_xyah(const Xyah& m);

}  // namespace mr2
