#pragma once

#include <Eigen/Core>

#include "mr2/geometry.hpp"

namespace mr2 {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateCovariance = Eigen::Matrix<double, 8, 8>;

/// Constant-velocity state over (cx, cy, a, h, vcx, vcy, va, vh).
struct KalmanState {
    StateVector mean = StateVector::Zero();
    StateCovariance covariance = StateCovariance::Identity();
    /// Set when the state was built from a zero-width measurement (a == 0).
    bool degenerate_aspect = false;

    BBox box() const;
};

/// Noise standard deviations are these scales times the box height.
struct KalmanParams {
    double position_noise_scale = 1.0 / 20.0;
    double velocity_noise_scale = 1.0 / 160.0;

    void validate() const;
};

/// Throws std::invalid_argument for a non-finite box or zero height.
KalmanState kf_init(const BBox& measurement, const KalmanParams& params = {});

KalmanState kf_predict(const KalmanState& state, const KalmanParams& params = {});

/// Corrects the observed (cx, cy, a, h) block.
/// Throws std::invalid_argument for a non-finite or zero-height measurement.
KalmanState kf_update(const KalmanState& state, const BBox& measurement,
                      const KalmanParams& params = {});

}  // namespace mr2
