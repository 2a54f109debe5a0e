#pragma once

#include <cstdint>

#include "mr2/geometry.hpp"

namespace mr2 {

/// One full-resolution inference followed by `p` low-resolution ones.
struct ResolutionSchedule {
    int p = 0;
    Resolution full_res{320, 320};
    Resolution low_res{192, 192};
    double mac_full = 0.0;  // per-inference cost at full_res
    double mac_low = 0.0;   // per-inference cost at low_res

    /// Fraction of frames inferred at full resolution, 1 / (1 + p).
    double full_res_fraction() const { return 1.0 / (1.0 + p); }
    Resolution resolution_at(std::int64_t frame_index) const;
    void validate() const;
};

bool is_full_res(std::int64_t frame_index, int p);

struct MacEstimate {
    double mean_mac = 0.0;   // average per-frame cost under the schedule
    double reduction = 0.0;  // 1 - mean_mac / mac_full
};

/// Average per-frame MACs: rho * mac_full + (1 - rho) * mac_low, rho = 1/(1+p).
/// Throws std::invalid_argument when mac_full is zero.
MacEstimate mean_mac(const ResolutionSchedule& schedule);

}  // namespace mr2
