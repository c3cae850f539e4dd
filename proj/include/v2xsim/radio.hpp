#pragma once

#include <algorithm>
#include <cmath>

#include "v2xsim/geometry.hpp"

namespace v2xsim {

/// Linear power gain of one station→user link. Gains are channel-independent
/// in this model; channel = -1 marks "all channels".
struct LinkGain {
    int station_id = 0;
    int user_id = 0;
    int channel = -1;
    double gain = 0.0;
};

struct NoiseModel {
    double sigma2_w = 0.0; ///< per-channel noise power [W]
};

/// Euclidean distance clamped below at 1 m so the log-distance model stays finite.
inline double distance_m(const Vec3& a, const Vec3& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return std::max(1.0, std::sqrt(dx * dx + dy * dy + dz * dz));
}

/// Urban path loss: 28.1 + 37.6 log10(d) + log10(fc / 2.5), d in m, fc in GHz.
inline double path_loss_db(double d_m, double fc_ghz) {
    return 28.1 + 37.6 * std::log10(d_m) + std::log10(fc_ghz / 2.5);
}

inline double path_gain(double d_m, double fc_ghz) {
    return std::pow(10.0, -path_loss_db(d_m, fc_ghz) / 10.0);
}

/// Converts a noise density in dBm/Hz to per-channel noise power in watts.
inline double noise_power_w(double n0_dbm_hz, double bandwidth_hz) {
    return std::pow(10.0, (n0_dbm_hz - 30.0) / 10.0) * bandwidth_hz;
}

/// Far user decodes its own high-power signal, seeing the near user's
/// superposed power as interference at the far user's own gain.
inline double se_far(double p_far_w, double h_far, double p_near_w, double sigma2_w) {
    return std::log2(1.0 + p_far_w * h_far / (p_near_w * h_far + sigma2_w));
}

/// Near user decodes after SIC, interference-free within the pair.
inline double se_near(double p_near_w, double h_near, double sigma2_w) {
    return std::log2(1.0 + p_near_w * h_near / sigma2_w);
}

/// Single-user Shannon efficiency for OMA service.
inline double se_oma(double p_w, double h, double sigma2_w) {
    return std::log2(1.0 + p_w * h / sigma2_w);
}

/// SINR of the far-user signal observed at the near user minus the same
/// signal's SINR at the far user. The pair supports SIC iff this is >= p_tol.
inline double sic_margin(double p_near_w, double h_near, double p_far_w,
                         double h_far, double sigma2_w) {
    const double at_near = p_far_w * h_near / (p_near_w * h_near + sigma2_w);
    const double at_far = p_far_w * h_far / (p_near_w * h_far + sigma2_w);
    return at_near - at_far;
}

} // namespace v2xsim
