#include "mr2/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mr2 {

double BBox::area() const {
    return std::max(0.0, width()) * std::max(0.0, height());
}

bool BBox::valid() const {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) &&
           x1 <= x2 && y1 <= y2;
}

double iou(const BBox& a, const BBox& b) {
    const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    const double inter = (iw > 0.0 && ih > 0.0) ? iw * ih : 0.0;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

BBox rescale_bbox(const BBox& box, Resolution from, Resolution to) {
    if (from.width <= 0 || from.height <= 0)
        throw std::invalid_argument("rescale_bbox: source resolution must be positive");
    if (to.width <= 0 || to.height <= 0)
        throw std::invalid_argument("rescale_bbox: target resolution must be positive");
    if (from == to) return box;
    const double sx = static_cast<double>(to.width) / from.width;
    const double sy = static_cast<double>(to.height) / from.height;
    return {box.x1 * sx, box.y1 * sy, box.x2 * sx, box.y2 * sy};
}

Xyah to_xyah(const BBox& box) {
    const double h = box.height();
    return {box.center_x(), box.center_y(), h > 0.0 ? box.width() / h : 0.0, h};
}

BBox from_xyah(const Xyah& m) {
    const double w = m.aspect * m.height;
    return {m.cx - 0.5 * w, m.cy - 0.5 * m.height, m.cx + 0.5 * w, m.cy + 0.5 * m.height};
}

}  // namespace mr2
