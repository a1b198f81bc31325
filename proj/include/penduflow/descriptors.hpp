#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "penduflow/plant.hpp"

namespace penduflow {

/// Symmetric energy matrix E_kj = ½(v_k·v_j + Ω²·φ_k·φ_j) [rad²·s⁻²].
struct EnergyMatrix {
    double e11 = 0.0;
    double e22 = 0.0;
    double e12 = 0.0;
};

inline constexpr double kEnergyEps = 1e-10;

/// Energy-exchange coordinates of a mechanical state.
struct Descriptors {
    double E = 0.0;                ///< total excitation
    double P = 0.0;                ///< partition, +1 = all energy in pendulum 1
    double Q = 0.0;                ///< coherency index cos Δ
    double delta_wrapped = 0.0;    ///< Δ in [0, 2π)
    double delta_unwrapped = 0.0;  ///< Δ continued along a trajectory
    bool defined = true;           ///< false when E < eps_E
    bool q_held = false;           ///< Q reused from the previous sample (e11·e22 < eps_E²)
    double clamp_excess = 0.0;     ///< |Q_raw| − 1 when positive, else 0
};

EnergyMatrix energy_matrix(const MechState& s, double omega);

/// Stateless evaluation. Δ is signed via the skew pairing
/// sin Δ = Ω(v1·φ2 − v2·φ1) / (2·sqrt(e11·e22)), so delta_unwrapped ∈ (−π, π].
Descriptors descriptors_from_state(const MechState& s, double omega, double eps_E = kEnergyEps);

/// Single-owner accumulator that unwraps Δ and holds Q across degenerate samples.
class DescriptorTracker {
public:
    explicit DescriptorTracker(double omega, double eps_E = kEnergyEps)
        : omega_(omega), eps_(eps_E) {}

    Descriptors update(const MechState& s);

private:
    double omega_;
    double eps_;
    bool started_ = false;
    double last_q_ = 0.0;
    double last_sin_ = 0.0;
    double last_unwrapped_ = 0.0;
};

/// Inverse map (E, P, Δ, δ) → (φ1, v1, φ2, v2). Throws for E < 0 or |P| > 1.
MechState state_from_slow(double E, double P, double delta_shift, double fast_phase, double omega);

/// Centred moving mean; windows shrink at the edges.
std::vector<double> moving_average(std::span<const double> series, std::size_t window);

}  // namespace penduflow
