#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "penduflow/plant.hpp"

namespace penduflow {

/// Averaged envelope state.
struct SlowState {
    double E = 0.0;      ///< total excitation [rad²·s⁻²]
    double P = 0.0;      ///< energy partition
    double Delta = 0.0;  ///< phase shift [rad], unwrapped
};

struct SlowRates {
    double dE = 0.0;
    double dP = 0.0;
    double dDelta = 0.0;
};

/// Normalized per-pendulum energies λ1 = E(1+P)/Ω², λ2 = E(1−P)/Ω² [rad²].
struct LambdaPair {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

LambdaPair normalized_energies(double E, double P, double omega);

/// Which power of Ω multiplies the dry-friction term of dP/dt.
enum class FrictionPrefactor {
    AsPrinted,         ///< Ω²/E², the published averaged system
    EnergyConsistent,  ///< Ω⁴/E², what averaging the plant actually gives
};

inline constexpr double kPartitionEps = 1e-9;

struct SlowFlowOptions {
    FrictionPrefactor prefactor = FrictionPrefactor::AsPrinted;
    double eps_P = kPartitionEps;  ///< P is evaluated inside [−1+eps_P, 1−eps_P]
};

/// e^{−x}·[I0(x) − I1(x)] with x = λ/(2b): averaged magnetic stiffness factor.
double magnetic_phase_factor(double lambda, double b);

/// Averaged first-order system for (E, P, Δ).
SlowRates slow_rhs(const SlowState& s, CurrentPair cur, const PendulumModel& m,
                   const SlowFlowOptions& opts = {});

/// Carrier frequency dδ/dt; empty when λ1 = 0.
std::optional<double> fast_phase_rate(const SlowState& s, CurrentPair cur, const PendulumModel& m);

/// Numerical fast-phase average of the plant's exact (E, P, Δ) rates on the
/// harmonic ansatz, by `samples`-point midpoint quadrature over δ ∈ [0, 2π).
/// Independent of slow_rhs; used to audit it.
SlowRates averaged_full_rates(const SlowState& s, CurrentPair cur, const PendulumModel& m,
                              int samples = 4096);

/// Relative gap between slow_rhs and the numerical average, per component,
/// normalised by max(|numeric|, floor).
struct AveragingAudit {
    SlowRates closed_form;
    SlowRates numeric;
    double rel_dE = 0.0;
    double rel_dP = 0.0;
    double rel_dDelta = 0.0;
};

AveragingAudit audit_averaging(const SlowState& s, CurrentPair cur, const PendulumModel& m,
                               const SlowFlowOptions& opts = {}, int samples = 4096);

// ---------------------------------------------------------------------------
// Frozen-E cross-sections of the (Δ, P) plane.

struct StreamGrid {
    int n_delta = 41;
    int n_p = 41;
    double delta_min = -3.14159265358979323846;
    double delta_max = 3.14159265358979323846;
    double p_max = 1.0 - kPartitionEps;  ///< P spans [−p_max, p_max]
};

struct StreamSample {
    double Delta = 0.0;
    double P = 0.0;
    double dDelta = 0.0;
    double dP = 0.0;
};

std::vector<StreamSample> streamline_field(double E, CurrentPair cur, const StreamGrid& grid,
                                           const PendulumModel& m, const SlowFlowOptions& opts = {});

enum class StationaryKind { StableNode, UnstableNode, StableSpiral, UnstableSpiral, Saddle, Center };

const char* kind_name(StationaryKind kind);

struct StationaryPoint {
    double Delta = 0.0;
    double P = 0.0;
    StationaryKind kind = StationaryKind::Center;
    std::complex<double> eig1;
    std::complex<double> eig2;
};

/// Damped Newton from every grid seed (at most 50 iterations, non-converged
/// seeds dropped), deduplicated, classified from a central-difference
/// Jacobian with h = 1e-6. Only roots with Δ ∈ [delta_min, delta_max] and
/// |P| ≤ p_max are kept.
std::vector<StationaryPoint> stationary_points(double E, CurrentPair cur, const StreamGrid& seeds,
                                               const PendulumModel& m,
                                               const SlowFlowOptions& opts = {});

// ---------------------------------------------------------------------------
// Linear beat equations P'' + damping·P' + stiffness·P = forcing.

enum class BeatMode { Antiphase, Inphase };

struct LinearBeatCoeffs {
    double damping = 0.0;    ///< [s⁻¹]
    double stiffness = 0.0;  ///< [s⁻²]
    double forcing = 0.0;    ///< [s⁻²]
    BeatMode mode = BeatMode::Antiphase;
};

/// Coefficients linearized about Δ = π (Antiphase) or Δ = 0 (Inphase) and P = 0,
/// with Bessel functions evaluated at E/(2bΩ²). Requires E > 0.
LinearBeatCoeffs linearized_coeffs(BeatMode mode, double E, CurrentPair cur, const PendulumModel& m);

}  // namespace penduflow
