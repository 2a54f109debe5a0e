#include "mr2/kalman.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace mr2 {
namespace {

using MeasVector = Eigen::Matrix<double, 4, 1>;
using MeasCovariance = Eigen::Matrix<double, 4, 4>;
using ObsMatrix = Eigen::Matrix<double, 4, 8>;

// Aspect ratio is unitless, so its noise does not scale with height.
constexpr double kAspectPositionStd = 1e-2;
constexpr double kAspectVelocityStd = 1e-5;
constexpr double kAspectMeasurementStd = 1e-1;

const StateCovariance& transition() {
    static const StateCovariance f = [] {
        StateCovariance m = StateCovariance::Identity();
        for (int i = 0; i < 4; ++i) m(i, 4 + i) = 1.0;
        return m;
    }();
    return f;
}

const ObsMatrix& observation() {
    static const ObsMatrix h = ObsMatrix::Identity();
    return h;
}

MeasVector measure(const BBox& box) {
    if (!std::isfinite(box.x1) || !std::isfinite(box.y1) || !std::isfinite(box.x2) ||
        !std::isfinite(box.y2))
        throw std::invalid_argument("kalman: measurement has non-finite coordinates");
    if (!(box.height() > 0.0) || box.width() < 0.0)
        throw std::invalid_argument("kalman: measurement must have positive height");
    const Xyah m = to_xyah(box);
    return {m.cx, m.cy, m.aspect, m.height};
}

void symmetrize(StateCovariance& p) { p = 0.5 * (p + p.transpose()).eval(); }

}  // namespace

void KalmanParams::validate() const {
    if (!(position_noise_scale > 0.0) || !(velocity_noise_scale > 0.0))
        throw std::invalid_argument("kalman: noise scales must be positive");
}

BBox KalmanState::box() const {
    return from_xyah({mean(0), mean(1), mean(2), mean(3)});
}

KalmanState kf_init(const BBox& measurement, const KalmanParams& params) {
    const MeasVector z = measure(measurement);
    KalmanState s;
    s.mean.head<4>() = z;
    s.mean.tail<4>().setZero();
    s.degenerate_aspect = z(2) <= 0.0;

    // Velocity uncertainty is ten times the position uncertainty.
    const double pos = 2.0 * params.position_noise_scale * z(3);
    StateVector std_dev;
    std_dev << pos, pos, kAspectPositionStd, pos, 10.0 * pos, 10.0 * pos,
        10.0 * kAspectPositionStd, 10.0 * pos;
    s.covariance = std_dev.array().square().matrix().asDiagonal();
    return s;
}

KalmanState kf_predict(const KalmanState& state, const KalmanParams& params) {
    const double h = state.mean(3);
    const double pos = params.position_noise_scale * h;
    const double vel = params.velocity_noise_scale * h;
    StateVector std_dev;
    std_dev << pos, pos, kAspectPositionStd, pos, vel, vel, kAspectVelocityStd, vel;
    const StateCovariance q = std_dev.array().square().matrix().asDiagonal();

    const StateCovariance& f = transition();
    KalmanState out = state;
    out.mean = f * state.mean;
    out.covariance = f * state.covariance * f.transpose() + q;
    symmetrize(out.covariance);
    return out;
}

KalmanState kf_update(const KalmanState& state, const BBox& measurement,
                      const KalmanParams& params) {
    const MeasVector z = measure(measurement);
    const ObsMatrix& hm = observation();

    const double pos = params.position_noise_scale * state.mean(3);
    MeasVector r_std;
    r_std << pos, pos, kAspectMeasurementStd, pos;
    const MeasCovariance r = r_std.array().square().matrix().asDiagonal();

    const MeasVector projected = hm * state.mean;
    const MeasCovariance s = hm * state.covariance * hm.transpose() + r;
    const Eigen::Matrix<double, 8, 4> pht = state.covariance * hm.transpose();

    // K = P H^T S^-1, solved through the Cholesky factor of S.
    const Eigen::LLT<MeasCovariance> llt(s);
    const Eigen::Matrix<double, 8, 4> gain = llt.solve(pht.transpose()).transpose();

    KalmanState out = state;
    out.mean = state.mean + gain * (z - projected);
    // Joseph form keeps the posterior symmetric positive semidefinite.
    const StateCovariance ikh = StateCovariance::Identity() - gain * hm;
    out.covariance = ikh * state.covariance * ikh.transpose() + gain * r * gain.transpose();
    symmetrize(out.covariance);
    out.degenerate_aspect = z(2) <= 0.0;
    return out;
}

}  // namespace mr2
