#include "penduflow/slowflow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "penduflow/bessel.hpp"
#include "penduflow/descriptors.hpp"

namespace penduflow {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp_partition(double P, double eps) { return std::clamp(P, -1.0 + eps, 1.0 - eps); }

}  // namespace

LambdaPair normalized_energies(double E, double P, double omega) {
    const double om2 = omega * omega;
    return {E * (1.0 + P) / om2, E * (1.0 - P) / om2};
}

double magnetic_phase_factor(double lambda, double b) {
    const double x = lambda / (2.0 * b);
    return bessel_i_scaled(0, x) - bessel_i_scaled(1, x);
}

SlowRates slow_rhs(const SlowState& s, CurrentPair cur, const PendulumModel& m,
                   const SlowFlowOptions& opts) {
    if (!(s.E > 0.0)) return {};
    const auto& u = m.unit();
    const auto& p = m.phys();
    const double om = u.Omega;
    const double om2 = om * om;
    const double E = s.E;
    const double P = clamp_partition(s.P, opts.eps_P);
    const double root = std::sqrt(1.0 - P * P);
    const double cd = std::cos(s.Delta);
    const double sd = std::sin(s.Delta);
    const auto [l1, l2] = normalized_energies(E, P, om);
    const double r1 = std::sqrt(l1);
    const double r2 = std::sqrt(l2);

    SlowRates r;
    r.dE = -2.0 * u.alpha * om * E * (1.0 - root * cd) -
           4.0 / kPi * om2 * (u.zeta1 * r1 + u.zeta2 * r2);

    const double friction_scale =
        (opts.prefactor == FrictionPrefactor::AsPrinted ? om2 : om2 * om2) / (E * E);
    r.dP = om * root * (u.beta * sd - 2.0 * u.alpha * P * cd) -
           4.0 / kPi * friction_scale * (u.zeta1 * l2 * r1 - u.zeta2 * l1 * r2);

    r.dDelta = E * P / (8.0 * om) - om / root * (u.beta * P * cd + 2.0 * u.alpha * sd) +
               m.magnetic_gain() / om *
                   (cur.i1 * magnetic_phase_factor(l1, p.b) - cur.i2 * magnetic_phase_factor(l2, p.b));
    return r;
}

std::optional<double> fast_phase_rate(const SlowState& s, CurrentPair cur, const PendulumModel& m) {
    const auto& u = m.unit();
    const auto [l1, l2] = normalized_energies(s.E, s.P, u.Omega);
    if (!(l1 > 0.0)) return std::nullopt;
    const double bracket = 1.0 + 0.5 * u.beta - l1 / 16.0 -
                           0.5 * std::sqrt(l2 / l1) *
                               (u.beta * std::cos(s.Delta) - 2.0 * u.alpha * std::sin(s.Delta));
    return bracket * u.Omega -
           m.magnetic_gain() / u.Omega * cur.i1 * magnetic_phase_factor(l1, m.phys().b);
}

SlowRates averaged_full_rates(const SlowState& s, CurrentPair cur, const PendulumModel& m,
                              int samples) {
    if (samples < 1) throw std::invalid_argument("averaged_full_rates: samples must be positive");
    const double om = m.unit().Omega;
    const double om2 = om * om;
    SlowRates acc;
    for (int k = 0; k < samples; ++k) {
        const double fast = 2.0 * kPi * (k + 0.5) / samples;
        const MechState x = state_from_slow(s.E, s.P, s.Delta, fast, om);
        const StateDerivative d = plant_rhs(x, cur, m);
        const EnergyMatrix em = energy_matrix(x, om);
        const double de11 = x.v1 * d.dv1 + om2 * x.phi1 * d.dphi1;
        const double de22 = x.v2 * d.dv2 + om2 * x.phi2 * d.dphi2;
        const double dE = de11 + de22;
        const double E = em.e11 + em.e22;
        // Phase θ_k = atan2(−v_k, Ω·φ_k); Δ = θ2 − θ1.
        const double dtheta1 = om * (x.v1 * d.dphi1 - x.phi1 * d.dv1) / (2.0 * em.e11);
        const double dtheta2 = om * (x.v2 * d.dphi2 - x.phi2 * d.dv2) / (2.0 * em.e22);
        acc.dE += dE;
        acc.dP += (de11 - de22) / E - (em.e11 - em.e22) / E * dE / E;
        acc.dDelta += dtheta2 - dtheta1;
    }
    acc.dE /= samples;
    acc.dP /= samples;
    acc.dDelta /= samples;
    return acc;
}

AveragingAudit audit_averaging(const SlowState& s, CurrentPair cur, const PendulumModel& m,
                               const SlowFlowOptions& opts, int samples) {
    AveragingAudit a;
    a.closed_form = slow_rhs(s, cur, m, opts);
    a.numeric = averaged_full_rates(s, cur, m, samples);
    auto rel = [](double cf, double num) {
        return std::abs(cf - num) / std::max(std::abs(num), 1e-12);
    };
    a.rel_dE = rel(a.closed_form.dE, a.numeric.dE);
    a.rel_dP = rel(a.closed_form.dP, a.numeric.dP);
    a.rel_dDelta = rel(a.closed_form.dDelta, a.numeric.dDelta);
    return a;
}

std::vector<StreamSample> streamline_field(double E, CurrentPair cur, const StreamGrid& grid,
                                           const PendulumModel& m, const SlowFlowOptions& opts) {
    if (grid.n_delta < 2 || grid.n_p < 2) throw std::invalid_argument("stream grid needs 2+ points per axis");
    if (!(E > 0.0)) throw std::invalid_argument("streamline_field: E must be positive");
    std::vector<StreamSample> out;
    out.reserve(static_cast<std::size_t>(grid.n_delta) * grid.n_p);
    for (int j = 0; j < grid.n_p; ++j) {
        const double P = -grid.p_max + 2.0 * grid.p_max * j / (grid.n_p - 1);
        for (int i = 0; i < grid.n_delta; ++i) {
            const double D = grid.delta_min + (grid.delta_max - grid.delta_min) * i / (grid.n_delta - 1);
            const SlowRates r = slow_rhs({E, P, D}, cur, m, opts);
            out.push_back({D, P, r.dDelta, r.dP});
        }
    }
    return out;
}

const char* kind_name(StationaryKind kind) {
    switch (kind) {
        case StationaryKind::StableNode: return "stable_node";
        case StationaryKind::UnstableNode: return "unstable_node";
        case StationaryKind::StableSpiral: return "stable_spiral";
        case StationaryKind::UnstableSpiral: return "unstable_spiral";
        case StationaryKind::Saddle: return "saddle";
        case StationaryKind::Center: return "center";
    }
    return "?";
}

namespace {

using Vec2 = std::array<double, 2>;  // (Δ, P)

struct PlaneField {
    double E;
    CurrentPair cur;
    const PendulumModel& model;
    const SlowFlowOptions& opts;

    Vec2 operator()(const Vec2& x) const {
        const SlowRates r = slow_rhs({E, x[1], x[0]}, cur, model, opts);
        return {r.dDelta, r.dP};
    }

    // Central differences, column k = ∂F/∂x_k.
    std::array<Vec2, 2> jacobian(const Vec2& x, double h = 1e-6) const {
        std::array<Vec2, 2> cols{};
        for (int k = 0; k < 2; ++k) {
            Vec2 hi = x;
            Vec2 lo = x;
            hi[k] += h;
            lo[k] -= h;
            const Vec2 fh = (*this)(hi);
            const Vec2 fl = (*this)(lo);
            cols[k] = {(fh[0] - fl[0]) / (2.0 * h), (fh[1] - fl[1]) / (2.0 * h)};
        }
        return cols;
    }
};

double norm_inf(const Vec2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

std::optional<Vec2> newton(const PlaneField& f, Vec2 x, double p_max) {
    Vec2 fx = f(x);
    for (int it = 0; it < 50; ++it) {
        if (norm_inf(fx) < 1e-13) return x;
        const auto J = f.jacobian(x);
        const double a = J[0][0], b = J[1][0], c = J[0][1], d = J[1][1];
        const double det = a * d - b * c;
        if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
        const Vec2 step{(d * fx[0] - b * fx[1]) / det, (-c * fx[0] + a * fx[1]) / det};
        double lambda = 1.0;
        Vec2 trial{};
        Vec2 ft{};
        for (int halving = 0; halving < 20; ++halving) {
            trial = {x[0] - lambda * step[0], x[1] - lambda * step[1]};
            if (std::abs(trial[1]) <= p_max) {
                ft = f(trial);
                if (norm_inf(ft) < norm_inf(fx)) break;
            }
            lambda *= 0.5;
        }
        if (std::abs(trial[1]) > p_max || !std::isfinite(norm_inf(ft))) return std::nullopt;
        const double moved = lambda * norm_inf(step);
        x = trial;
        fx = ft;
        if (moved < 1e-14 && norm_inf(fx) < 1e-10) return x;
    }
    return norm_inf(fx) < 1e-10 ? std::optional<Vec2>(x) : std::nullopt;
}

}  // namespace

std::vector<StationaryPoint> stationary_points(double E, CurrentPair cur, const StreamGrid& seeds,
                                               const PendulumModel& m, const SlowFlowOptions& opts) {
    const PlaneField field{E, cur, m, opts};
    std::vector<StationaryPoint> found;
    const double slack = 1e-9;
    for (const auto& seed : streamline_field(E, cur, seeds, m, opts)) {
        const auto root = newton(field, {seed.Delta, seed.P}, seeds.p_max);
        if (!root) continue;
        const auto [D, P] = *root;
        if (D < seeds.delta_min - slack || D > seeds.delta_max + slack) continue;
        const bool duplicate = std::any_of(found.begin(), found.end(), [&](const StationaryPoint& s) {
            return std::abs(s.Delta - D) < 1e-6 && std::abs(s.P - P) < 1e-6;
        });
        if (duplicate) continue;

        const auto J = field.jacobian(*root);
        const double tr = J[0][0] + J[1][1];
        const double det = J[0][0] * J[1][1] - J[1][0] * J[0][1];
        const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det));
        StationaryPoint sp{D, P, StationaryKind::Center, 0.5 * (tr + disc), 0.5 * (tr - disc)};
        const double tol = 1e-6 * std::max(1.0, std::sqrt(std::abs(det)));
        if (det < 0.0) {
            sp.kind = StationaryKind::Saddle;
        } else if (tr * tr - 4.0 * det < 0.0) {
            sp.kind = std::abs(tr) <= tol ? StationaryKind::Center
                      : tr > 0.0          ? StationaryKind::UnstableSpiral
                                          : StationaryKind::StableSpiral;
        } else {
            sp.kind = tr > 0.0 ? StationaryKind::UnstableNode : StationaryKind::StableNode;
        }
        found.push_back(sp);
    }
    std::sort(found.begin(), found.end(), [](const StationaryPoint& a, const StationaryPoint& b) {
        return a.Delta != b.Delta ? a.Delta < b.Delta : a.P < b.P;
    });
    return found;
}

LinearBeatCoeffs linearized_coeffs(BeatMode mode, double E, CurrentPair cur, const PendulumModel& m) {
    if (!(E > 0.0)) throw std::invalid_argument("linearized_coeffs: E must be positive");
    const auto& u = m.unit();
    const auto& p = m.phys();
    const double om = u.Omega;
    const double om2 = om * om;
    const double x = E / (2.0 * p.b * om2);
    const double i0s = bessel_i_scaled(0, x);  // e^{-x}·I0(x)
    const double i1s = bessel_i_scaled(1, x);
    const double dry = (u.zeta1 + u.zeta2) / (kPi * std::sqrt(E));
    const double dry_asym = 8.0 * u.alpha * om2 * (u.zeta1 - u.zeta2) / (kPi * std::sqrt(E));
    const double mag_stiff = p.a * u.beta / (p.J * p.b * p.b * om2) *
                             ((p.b * om2 + E) * i1s - E * i0s) * (cur.i1 + cur.i2);
    const double mag_force = p.a * u.beta / (p.J * p.b) * (i0s - i1s) * (cur.i1 - cur.i2);

    LinearBeatCoeffs c;
    c.mode = mode;
    if (mode == BeatMode::Antiphase) {
        c.damping = -2.0 * om * (2.0 * u.alpha + dry);
        c.stiffness = om2 * (u.beta * u.beta + 4.0 * u.alpha * (u.alpha + dry)) + u.beta * E / 8.0 + mag_stiff;
        c.forcing = dry_asym - mag_force;
    } else {
        c.damping = 2.0 * om * (2.0 * u.alpha - dry);
        c.stiffness = om2 * (u.beta * u.beta + 4.0 * u.alpha * (u.alpha - dry)) - u.beta * E / 8.0 + mag_stiff;
        c.forcing = -dry_asym + mag_force;
    }
    return c;
}

}  // namespace penduflow
