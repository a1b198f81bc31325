#pragma once

#include <vector>

#include "penduflow/params.hpp"

namespace penduflow {

/// Full plant state. A stuck pendulum has its velocity pinned to exactly zero.
struct MechState {
    double phi1 = 0.0;  ///< [rad]
    double v1 = 0.0;    ///< [rad·s⁻¹]
    double phi2 = 0.0;
    double v2 = 0.0;
    bool stuck1 = false;
    bool stuck2 = false;
};

/// Coil currents [A]. Positive repels the magnet, negative attracts it.
struct CurrentPair {
    double i1 = 0.0;
    double i2 = 0.0;
};

inline constexpr double kDefaultCurrentLimit = 1.0;

/// Clips both currents to [-limit, limit]; `clipped` reports whether either was changed.
CurrentPair saturate(CurrentPair cur, double limit, bool* clipped = nullptr);

struct StateDerivative {
    double dphi1 = 0.0;
    double dv1 = 0.0;
    double dphi2 = 0.0;
    double dv2 = 0.0;
};

enum class FrictionMode {
    Filippov,  ///< sgn(v) with explicit sticking
    Smoothed,  ///< tanh(v/eps), no sticking; cross-check only
};

struct FrictionConfig {
    FrictionMode mode = FrictionMode::Filippov;
    double v_tol = 1e-6;           ///< [rad·s⁻¹]
    double smoothing_eps = 1e-5;   ///< [rad·s⁻¹]
};

/// a·(1 − exp(−φ²/b)), per unit current.
double magnetic_potential(double phi, const PhysicalParams& p);

/// d/dφ of magnetic_potential: (2a/b)·exp(−φ²/b)·φ.
double magnetic_torque(double phi, const PhysicalParams& p);

/// Angular acceleration of pendulum `j` (1 or 2) from every term except dry
/// friction: gravity with cubic correction, coupling spring and damper, coil.
double non_friction_accel(int j, const MechState& s, CurrentPair cur, const PendulumModel& m);

/// Right-hand side of the four first-order equations of motion.
StateDerivative plant_rhs(const MechState& s, CurrentPair cur, const PendulumModel& m,
                          const FrictionConfig& friction = {});

/// Applies the Filippov stick/release rule after an accepted step from
/// `before` to `after`. A moving pendulum sticks when its velocity reaches zero
/// within the step (sign change or |v| < v_tol) and the non-friction
/// acceleration does not exceed the static limit 2·Omega·zeta; a stuck one is
/// released once that limit is exceeded. No-op in Smoothed mode.
MechState stick_slip_update(const MechState& before, const MechState& after, CurrentPair cur,
                            const PendulumModel& m, const FrictionConfig& friction = {});

/// First integral of the frictionless, current-free plant (per unit inertia):
/// ½(v1²+v2²) + ½Ω²(φ1²+φ2²) + ½Ω²β(φ1−φ2)² − (Ω²/24)(φ1⁴+φ2⁴).
double conservative_energy(const MechState& s, const UnitlessParams& u);

// ---------------------------------------------------------------------------
// Linearized (quadratic-potential) equilibrium analysis. The cubic gravity
// term is dropped here; it only enters the full plant.

/// ½Ω²[φ1² + β(φ1−φ2)² + φ2²] − (a/(bJ))·(i1·φ1² + i2·φ2²).
double quadratic_potential(double phi1, double phi2, CurrentPair cur, const PendulumModel& m);

struct SquaredFrequencies {
    double omega1_sq = 0.0;  ///< lower branch
    double omega2_sq = 0.0;  ///< upper branch
};

SquaredFrequencies eigenfrequencies(CurrentPair cur, const PendulumModel& m);

enum class EquilibriumKind { Minimum, Saddle, Maximum };

struct EquilibriumClass {
    EquilibriumKind kind = EquilibriumKind::Minimum;
    double omega1_sq = 0.0;
    double omega2_sq = 0.0;
    bool boundary = false;  ///< a squared frequency lies within tol of zero
};

inline constexpr double kClassTolerance = 1e-12;

/// Sign classification of the squared eigenfrequencies. Values within `tol`
/// of zero count as non-positive, i.e. the lower-stability neighbour wins.
EquilibriumClass classify_equilibrium(CurrentPair cur, const PendulumModel& m,
                                      double tol = kClassTolerance);

const char* kind_name(EquilibriumKind kind);

struct StabilityCell {
    CurrentPair current;
    EquilibriumClass cls;
};

/// grid × grid cells over [−range, range]², i2 varying fastest.
std::vector<StabilityCell> stability_map(int grid, double range, const PendulumModel& m,
                                         double tol = kClassTolerance);

}  // namespace penduflow
