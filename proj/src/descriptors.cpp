#include "penduflow/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace penduflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct PhaseParts {
    double q_raw;
    double sin_part;
};

PhaseParts phase_parts(const MechState& s, const EnergyMatrix& em, double omega) {
    const double norm = std::sqrt(em.e11 * em.e22);
    return {em.e12 / norm, 0.5 * omega * (s.v1 * s.phi2 - s.v2 * s.phi1) / norm};
}

double wrap_positive(double angle) {
    double w = std::fmod(angle, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w >= kTwoPi ? 0.0 : w;
}

}  // namespace

EnergyMatrix energy_matrix(const MechState& s, double omega) {
    const double om2 = omega * omega;
    return {0.5 * (s.v1 * s.v1 + om2 * s.phi1 * s.phi1), 0.5 * (s.v2 * s.v2 + om2 * s.phi2 * s.phi2),
            0.5 * (s.v1 * s.v2 + om2 * s.phi1 * s.phi2)};
}

Descriptors descriptors_from_state(const MechState& s, double omega, double eps_E) {
    const EnergyMatrix em = energy_matrix(s, omega);
    Descriptors d;
    d.E = em.e11 + em.e22;
    if (d.E < eps_E) {
        d.defined = false;
        return d;
    }
    d.P = (em.e11 - em.e22) / d.E;
    if (em.e11 * em.e22 < eps_E * eps_E) {
        d.q_held = true;
        return d;
    }
    const auto parts = phase_parts(s, em, omega);
    d.clamp_excess = std::max(0.0, std::abs(parts.q_raw) - 1.0);
    d.Q = std::clamp(parts.q_raw, -1.0, 1.0);
    d.delta_unwrapped = std::atan2(parts.sin_part, parts.q_raw);
    d.delta_wrapped = wrap_positive(d.delta_unwrapped);
    return d;
}

Descriptors DescriptorTracker::update(const MechState& s) {
    Descriptors d = descriptors_from_state(s, omega_, eps_);
    if (!d.defined || d.q_held) {
        d.Q = last_q_;
        d.q_held = started_;
        d.delta_unwrapped = last_unwrapped_;
        d.delta_wrapped = wrap_positive(last_unwrapped_);
        return d;
    }
    if (started_) {
        double step = d.delta_unwrapped - std::atan2(last_sin_, last_q_);
        step -= kTwoPi * std::round(step / kTwoPi);
        d.delta_unwrapped = last_unwrapped_ + step;
    }
    started_ = true;
    last_q_ = d.Q;
    last_sin_ = std::sin(d.delta_unwrapped);
    last_unwrapped_ = d.delta_unwrapped;
    return d;
}

MechState state_from_slow(double E, double P, double delta_shift, double fast_phase, double omega) {
    if (!(E >= 0.0)) throw std::invalid_argument("state_from_slow: E must be non-negative");
    if (!(std::abs(P) <= 1.0)) throw std::invalid_argument("state_from_slow: |P| must not exceed 1");
    const double r1 = std::sqrt(E * (1.0 + P));
    const double r2 = std::sqrt(E * (1.0 - P));
    MechState s;
    s.phi1 = r1 * std::cos(fast_phase) / omega;
    s.v1 = -r1 * std::sin(fast_phase);
    s.phi2 = r2 * std::cos(fast_phase + delta_shift) / omega;
    s.v2 = -r2 * std::sin(fast_phase + delta_shift);
    return s;
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
    if (window == 0) throw std::invalid_argument("moving_average: window must be at least 1");
    const std::size_t n = series.size();
    std::vector<double> out(n);
    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + series[i];
    // Nominal window [i − w/2, i − w/2 + w), clipped to the series.
    const auto left = static_cast<std::ptrdiff_t>(window / 2);
    const auto len = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t i = 0; i < len; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - left);
        const std::ptrdiff_t hi = std::min(len, i - left + static_cast<std::ptrdiff_t>(window));
        out[i] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    }
    return out;
}

}  // namespace penduflow
