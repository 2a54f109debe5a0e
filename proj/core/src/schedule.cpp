#include "mr2/schedule.hpp"

#include <stdexcept>

#include "mr2/errors.hpp"

namespace mr2 {

bool is_full_res(std::int64_t frame_index, int p) {
    if (frame_index < 0 || p < 0) throw std::invalid_argument("is_full_res: negative argument");
    return frame_index % (static_cast<std::int64_t>(p) + 1) == 0;
}

Resolution ResolutionSchedule::resolution_at(std::int64_t frame_index) const {
    return is_full_res(frame_index, p) ? full_res : low_res;
}

void ResolutionSchedule::validate() const {
    if (p < 0) throw ValidationError("schedule: P must be >= 0");
    if (full_res.width <= 0 || full_res.height <= 0 || low_res.width <= 0 ||
        low_res.height <= 0)
        throw ValidationError("schedule: resolutions must be positive");
    if (low_res.width > full_res.width || low_res.height > full_res.height)
        throw ValidationError("schedule: low_res must not exceed full_res");
    if (mac_full < 0.0 || mac_low < 0.0)
        throw ValidationError("schedule: MAC counts must be non-negative");
}

MacEstimate mean_mac(const ResolutionSchedule& schedule) {
    if (schedule.mac_full == 0.0)
        throw std::invalid_argument("mean_mac: mac_full is zero, reduction undefined");
    const double rho = schedule.full_res_fraction();
    MacEstimate out;
    out.mean_mac = rho * schedule.mac_full + (1.0 - rho) * schedule.mac_low;
    out.reduction = 1.0 - out.mean_mac / schedule.mac_full;
    return out;
}

}  // namespace mr2
