#include "penduflow/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace penduflow {

namespace {

double sign(double x) { return (x > 0.0) - (x < 0.0); }

double friction_limit(int j, const UnitlessParams& u) {
    return 2.0 * u.Omega * (j == 1 ? u.zeta1 : u.zeta2);
}

// Acceleration of a moving (or just-released) pendulum including dry friction.
double friction_accel(double v, double applied, double limit, const FrictionConfig& friction) {
    if (friction.mode == FrictionMode::Smoothed) {
        return applied - limit * std::tanh(v / friction.smoothing_eps);
    }
    if (v != 0.0) return applied - limit * sign(v);
    // Zero velocity without a stick flag: friction opposes the applied torque
    // up to the static limit.
    if (std::abs(applied) <= limit) return 0.0;
    return applied - limit * sign(applied);
}

}  // namespace

CurrentPair saturate(CurrentPair cur, double limit, bool* clipped) {
    const CurrentPair out{std::clamp(cur.i1, -limit, limit), std::clamp(cur.i2, -limit, limit)};
    if (clipped) *clipped = out.i1 != cur.i1 || out.i2 != cur.i2;
    return out;
}

double magnetic_potential(double phi, const PhysicalParams& p) {
    return p.a * -std::expm1(-phi * phi / p.b);
}

double magnetic_torque(double phi, const PhysicalParams& p) {
    return 2.0 * p.a / p.b * std::exp(-phi * phi / p.b) * phi;
}

double non_friction_accel(int j, const MechState& s, CurrentPair cur, const PendulumModel& m) {
    const auto& u = m.unit();
    const double om2 = u.Omega * u.Omega;
    const bool first = j == 1;
    const double phi = first ? s.phi1 : s.phi2;
    const double other = first ? s.phi2 : s.phi1;
    const double v = first ? s.v1 : s.v2;
    const double v_other = first ? s.v2 : s.v1;
    const double i = first ? cur.i1 : cur.i2;
    const double cubic = m.gravity() == GravityModel::Cubic ? phi * phi * phi / 6.0 : 0.0;
    const double coupling = 2.0 * u.Omega * u.alpha * (v - v_other) + om2 * (u.beta * (phi - other) - cubic);
    return -om2 * phi - coupling + i / m.phys().J * magnetic_torque(phi, m.phys());
}

StateDerivative plant_rhs(const MechState& s, CurrentPair cur, const PendulumModel& m,
                          const FrictionConfig& friction) {
    const auto& u = m.unit();
    StateDerivative d;
    if (!s.stuck1) {
        d.dphi1 = s.v1;
        d.dv1 = friction_accel(s.v1, non_friction_accel(1, s, cur, m), friction_limit(1, u), friction);
    }
    if (!s.stuck2) {
        d.dphi2 = s.v2;
        d.dv2 = friction_accel(s.v2, non_friction_accel(2, s, cur, m), friction_limit(2, u), friction);
    }
    return d;
}

MechState stick_slip_update(const MechState& before, const MechState& after, CurrentPair cur,
                            const PendulumModel& m, const FrictionConfig& friction) {
    if (friction.mode != FrictionMode::Filippov) return after;
    MechState out = after;
    for (int j = 1; j <= 2; ++j) {
        const double limit = friction_limit(j, m.unit());
        bool& stuck = j == 1 ? out.stuck1 : out.stuck2;
        double& v = j == 1 ? out.v1 : out.v2;
        if (limit <= 0.0) {
            stuck = false;
            continue;
        }
        const double v_prev = j == 1 ? before.v1 : before.v2;

        MechState probe = out;
        (j == 1 ? probe.v1 : probe.v2) = 0.0;
        const double applied = non_friction_accel(j, probe, cur, m);

        if (stuck) {
            v = 0.0;
            if (std::abs(applied) > limit) stuck = false;
            continue;
        }
        const bool reached_zero =
            std::abs(v) < friction.v_tol || (v_prev != 0.0 && v * v_prev < 0.0);
        if (reached_zero && std::abs(applied) <= limit) {
            stuck = true;
            v = 0.0;
        }
    }
    return out;
}

double conservative_energy(const MechState& s, const UnitlessParams& u) {
    const double om2 = u.Omega * u.Omega;
    const double d = s.phi1 - s.phi2;
    const double q1 = s.phi1 * s.phi1;
    const double q2 = s.phi2 * s.phi2;
    return 0.5 * (s.v1 * s.v1 + s.v2 * s.v2) + 0.5 * om2 * (q1 + q2) + 0.5 * om2 * u.beta * d * d -
           om2 / 24.0 * (q1 * q1 + q2 * q2);
}

double quadratic_potential(double phi1, double phi2, CurrentPair cur, const PendulumModel& m) {
    const auto& u = m.unit();
    const double d = phi1 - phi2;
    return 0.5 * u.Omega * u.Omega * (phi1 * phi1 + u.beta * d * d + phi2 * phi2) -
           m.magnetic_gain() * (cur.i1 * phi1 * phi1 + cur.i2 * phi2 * phi2);
}

SquaredFrequencies eigenfrequencies(CurrentPair cur, const PendulumModel& m) {
    const auto& u = m.unit();
    const double om2 = u.Omega * u.Omega;
    const double g = m.magnetic_gain();
    const double centre = (1.0 + u.beta) * om2 - g * (cur.i1 + cur.i2);
    const double split = std::hypot(u.beta * om2, g * (cur.i1 - cur.i2));
    return {centre - split, centre + split};
}

EquilibriumClass classify_equilibrium(CurrentPair cur, const PendulumModel& m, double tol) {
    const auto w = eigenfrequencies(cur, m);
    EquilibriumClass out{.omega1_sq = w.omega1_sq, .omega2_sq = w.omega2_sq};
    out.boundary = std::abs(w.omega1_sq) <= tol || std::abs(w.omega2_sq) <= tol;
    const int positive = (w.omega1_sq > tol) + (w.omega2_sq > tol);
    out.kind = positive == 2   ? EquilibriumKind::Minimum
               : positive == 1 ? EquilibriumKind::Saddle
                               : EquilibriumKind::Maximum;
    return out;
}

const char* kind_name(EquilibriumKind kind) {
    switch (kind) {
        case EquilibriumKind::Minimum: return "Minimum";
        case EquilibriumKind::Saddle: return "Saddle";
        case EquilibriumKind::Maximum: return "Maximum";
    }
    return "?";
}

std::vector<StabilityCell> stability_map(int grid, double range, const PendulumModel& m,
                                         double tol) {
    if (grid < 2) throw std::invalid_argument("stability map grid must be at least 2");
    if (!(range > 0.0)) throw std::invalid_argument("stability map range must be positive");
    std::vector<StabilityCell> cells;
    cells.reserve(static_cast<std::size_t>(grid) * grid);
    const double step = 2.0 * range / (grid - 1);
    for (int r = 0; r < grid; ++r) {
        for (int c = 0; c < grid; ++c) {
            const CurrentPair cur{-range + r * step, -range + c * step};
            cells.push_back({cur, classify_equilibrium(cur, m, tol)});
        }
    }
    return cells;
}

}  // namespace penduflow
