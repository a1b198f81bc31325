#include "penduflow/sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/numeric/odeint.hpp>
#include <spdlog/spdlog.h>

namespace penduflow {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kPi = std::numbers::pi;

using State3 = std::array<double, 3>;
using State4 = std::array<double, 4>;

bool all_finite(const State4& x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

bool all_finite(const State3& x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

/// Number of output samples on [0, t_end] with spacing dt, tolerant to rounding.
std::size_t sample_count(double t_end, double dt) {
    return static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12))) + 1;
}

void warn_saturation(const Trajectory& tr, const std::string& label) {
    if (tr.saturated_updates > 0) {
        spdlog::warn("{}: {} controller updates clipped to the current limit", label,
                     tr.saturated_updates);
    }
}

}  // namespace

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::Completed: return "completed";
        case Termination::Localized: return "localized";
        case Termination::EnergyFloor: return "energy_floor";
        case Termination::StepUnderflow: return "step_underflow";
        case Termination::NonFinite: return "non_finite";
    }
    return "?";
}

void validate(const Scenario& sc) {
    if (!(sc.t_end > 0.0) || !std::isfinite(sc.t_end)) {
        throw std::invalid_argument("scenario t_end must be positive");
    }
    if (!(sc.output_dt > 0.0) || !std::isfinite(sc.output_dt)) {
        throw std::invalid_argument("scenario output_dt must be positive");
    }
    validate(sc.params);
}

MechState initial_mech(const Scenario& sc, double fast_phase) {
    if (const auto* mech = std::get_if<MechState>(&sc.initial)) return *mech;
    const auto& s = std::get<SlowState>(sc.initial);
    const UnitlessParams u = derive_unitless(sc.params);
    return state_from_slow(s.E, s.P, s.Delta, fast_phase, u.Omega);
}

SlowState initial_slow(const Scenario& sc) {
    if (const auto* slow = std::get_if<SlowState>(&sc.initial)) return *slow;
    const UnitlessParams u = derive_unitless(sc.params);
    const Descriptors d = descriptors_from_state(std::get<MechState>(sc.initial), u.Omega);
    if (!d.defined) throw std::invalid_argument("initial state has no energy; slow flow undefined");
    // Keep Δ near (−π, π] so that presets and converted states look alike.
    const double delta = d.delta_wrapped > kPi ? d.delta_wrapped - 2.0 * kPi : d.delta_wrapped;
    return {d.E, d.P, delta};
}

// ---------------------------------------------------------------------------
// Full plant

Trajectory integrate_full(const Scenario& sc, const FullRunOptions& opts) {
    validate(sc);
    if (!(opts.h > 0.0)) throw std::invalid_argument("integration step h must be positive");
    const PendulumModel model(sc.params, opts.gravity);
    const double omega = model.unit().Omega;

    const long stride = std::lround(sc.output_dt / opts.h);
    if (stride < 1 || std::abs(static_cast<double>(stride) * opts.h - sc.output_dt) > 1e-9 * sc.output_dt) {
        throw std::invalid_argument("output_dt must be an integer multiple of h");
    }
    const double control_dt = opts.control_dt > 0.0 ? opts.control_dt : sc.output_dt;
    const long control_stride = std::max(1L, std::lround(control_dt / opts.h));
    const std::size_t n_out = sample_count(sc.t_end, sc.output_dt);
    const long n_steps = static_cast<long>(n_out - 1) * stride;

    Trajectory tr;
    tr.model = ModelKind::Full;
    tr.times.reserve(n_out);
    tr.mech.reserve(n_out);
    tr.currents.reserve(n_out);
    tr.descriptors.reserve(n_out);

    MechState s = initial_mech(sc, opts.initial_fast_phase);
    CurrentController controller(sc.controller, omega);
    DescriptorTracker tracker(omega);

    auto command = [&](double t) {
        bool clipped = false;
        const CurrentPair c = saturate(controller.command(t, s), opts.current_limit, &clipped);
        if (clipped) ++tr.saturated_updates;
        return c;
    };

    CurrentPair cur;
    auto record = [&](double t) {
        tr.times.push_back(t);
        tr.mech.push_back(s);
        tr.currents.push_back(cur);
        tr.descriptors.push_back(tracker.update(s));
    };

    odeint::runge_kutta4<State4> rk4;
    auto system = [&](const State4& x, State4& dxdt, double) {
        const MechState ms{x[0], x[1], x[2], x[3], s.stuck1, s.stuck2};
        const StateDerivative d = plant_rhs(ms, cur, model, opts.friction);
        dxdt = {d.dphi1, d.dv1, d.dphi2, d.dv2};
    };

    // Open-loop currents are pure functions of time and are refreshed every
    // step; feedback is sampled every control_stride steps and held.
    const bool per_step = !sc.controller.is_feedback();
    for (long step = 0;; ++step) {
        const double t = static_cast<double>(step) * opts.h;
        if (step == 0 || per_step || step % control_stride == 0) cur = command(t);
        if (step % stride == 0) record(t);
        if (step == n_steps) break;

        State4 x{s.phi1, s.v1, s.phi2, s.v2};
        rk4.do_step(system, x, t, opts.h);
        if (!all_finite(x)) {
            tr.termination = Termination::NonFinite;
            tr.end_time = t;
            spdlog::error("{}: non-finite state at t = {}; last valid sample {}", sc.label, t,
                          tr.times.size() - 1);
            warn_saturation(tr, sc.label);
            return tr;
        }
        s = stick_slip_update(s, {x[0], x[1], x[2], x[3], s.stuck1, s.stuck2}, cur, model, opts.friction);
    }
    tr.end_time = static_cast<double>(n_steps) * opts.h;
    warn_saturation(tr, sc.label);
    return tr;
}

// ---------------------------------------------------------------------------
// Slow flow

namespace {

struct SlowSystem {
    const PendulumModel& model;
    const ControllerSpec& controller;
    const SlowRunOptions& opts;

    CurrentPair currents(double t, const State3& x, bool* clipped = nullptr) const {
        return saturate(slow_currents(controller, t, x[0], x[2]), opts.current_limit, clipped);
    }

    void operator()(const State3& x, State3& dxdt, double t) const {
        const SlowRates r = slow_rhs({x[0], x[1], x[2]}, currents(t, x), model, opts.flow);
        dxdt = {r.dE, r.dP, r.dDelta};
    }
};

enum class SlowEvent { None, Boundary, Floor };

/// Earliest event inside (t0, t1] of the dense-output interval, by bisection.
template <class Stepper>
std::pair<SlowEvent, double> locate_event(const Stepper& stepper, double t0, double t1,
                                          double p_limit, double e_floor) {
    auto boundary = [&](const State3& x) { return p_limit - std::abs(x[1]); };
    auto floor = [&](const State3& x) { return x[0] - e_floor; };
    State3 x1 = stepper.current_state();
    SlowEvent which = SlowEvent::None;
    double t_event = t1;
    for (SlowEvent ev : {SlowEvent::Boundary, SlowEvent::Floor}) {
        auto g = [&](const State3& x) { return ev == SlowEvent::Boundary ? boundary(x) : floor(x); };
        if (g(x1) > 0.0) continue;
        double lo = t0;
        double hi = t1;
        State3 x;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            stepper.calc_state(mid, x);
            if (g(x) > 0.0) lo = mid;
            else hi = mid;
        }
        if (which == SlowEvent::None || hi < t_event) {
            which = ev;
            t_event = hi;
        }
    }
    return {which, t_event};
}

}  // namespace

Trajectory integrate_slow(const Scenario& sc, const SlowRunOptions& opts) {
    validate(sc);
    const PendulumModel model(sc.params);
    const SlowSystem system{model, sc.controller, opts};
    const double p_limit = 1.0 - opts.flow.eps_P;
    const std::size_t n_out = sample_count(sc.t_end, sc.output_dt);
    const double t_last = static_cast<double>(n_out - 1) * sc.output_dt;

    Trajectory tr;
    tr.model = ModelKind::Slow;
    tr.times.reserve(n_out);
    tr.slow.reserve(n_out);

    auto record = [&](double t, const State3& x) {
        bool clipped = false;
        const CurrentPair c = system.currents(t, x, &clipped);
        if (clipped) ++tr.saturated_updates;
        tr.times.push_back(t);
        tr.slow.push_back({x[0], x[1], x[2]});
        tr.currents.push_back(c);
        Descriptors d;
        d.E = x[0];
        d.P = x[1];
        d.Q = std::cos(x[2]);
        d.delta_unwrapped = x[2];
        d.delta_wrapped = std::fmod(x[2], 2.0 * kPi);
        if (d.delta_wrapped < 0.0) d.delta_wrapped += 2.0 * kPi;
        d.defined = x[0] >= kEnergyEps;
        tr.descriptors.push_back(d);
    };

    const SlowState s0 = initial_slow(sc);
    State3 x{s0.E, s0.P, s0.Delta};
    if (!all_finite(x) || x[0] < 0.0 || std::abs(x[1]) > 1.0) {
        throw std::invalid_argument("slow initial state requires E >= 0 and |P| <= 1");
    }

    std::size_t next = 0;  // index of the next output sample
    auto sample_time = [&](std::size_t k) { return static_cast<double>(k) * sc.output_dt; };

    auto finish = [&](Termination why, double t, const State3& xe) {
        tr.termination = why;
        tr.end_time = t;
        if (tr.times.empty() || t > tr.times.back()) record(t, xe);
    };

    auto reflect = [&](double t, State3& xe) {
        // The depleted pendulum passes through zero amplitude, flipping its phase.
        xe[1] = std::copysign(p_limit, xe[1]);
        xe[2] += kPi;
        const SlowRates r = slow_rhs({xe[0], xe[1], xe[2]}, system.currents(t, xe), model, opts.flow);
        ++tr.reflections;
        return std::copysign(1.0, xe[1]) * r.dP < 0.0;
    };

    // Events at the initial instant.
    if (x[0] < opts.energy_floor) {
        finish(Termination::EnergyFloor, 0.0, x);
        return tr;
    }
    if (std::abs(x[1]) >= p_limit) {
        if (opts.boundary == BoundaryMode::EventStop || !reflect(0.0, x)) {
            finish(Termination::Localized, 0.0, x);
            return tr;
        }
    }
    record(0.0, x);
    next = 1;

    constexpr int kMaxReflections = 10000;
    constexpr double kMinStep = 1e-12;
    auto stepper = odeint::make_dense_output(opts.atol, opts.rtol, odeint::runge_kutta_dopri5<State3>());
    stepper.initialize(x, 0.0, std::min(1e-3, sc.output_dt));

    while (next < n_out) {
        const double t_prev = stepper.current_time();
        try {
            stepper.do_step(system);
        } catch (const std::exception& e) {
            spdlog::debug("{}: step failure at t = {}: {}", sc.label, t_prev, e.what());
            finish(Termination::StepUnderflow, t_prev, stepper.current_state());
            break;
        }
        const double t_cur = stepper.current_time();
        const State3 x_cur = stepper.current_state();
        if (!all_finite(x_cur)) {
            tr.termination = Termination::NonFinite;
            tr.end_time = t_prev;
            break;
        }

        const auto [event, t_event] = locate_event(stepper, t_prev, t_cur, p_limit, opts.energy_floor);
        const double t_emit = event == SlowEvent::None ? t_cur : t_event;
        State3 xs;
        while (next < n_out && sample_time(next) <= t_emit &&
               (event == SlowEvent::None || sample_time(next) < t_event)) {
            stepper.calc_state(sample_time(next), xs);
            record(sample_time(next), xs);
            ++next;
        }
        if (event == SlowEvent::None) {
            if (stepper.current_time_step() < kMinStep && next < n_out) {
                finish(Termination::StepUnderflow, t_cur, x_cur);
                break;
            }
            continue;
        }

        State3 xe;
        stepper.calc_state(t_event, xe);
        if (event == SlowEvent::Floor) {
            finish(Termination::EnergyFloor, t_event, xe);
            break;
        }
        if (opts.boundary == BoundaryMode::EventStop) {
            finish(Termination::Localized, t_event, xe);
            break;
        }
        if (!reflect(t_event, xe) || tr.reflections > kMaxReflections) {
            finish(Termination::Localized, t_event, xe);
            break;
        }
        stepper.initialize(xe, t_event, 1e-6);
    }
    if (next >= n_out) tr.end_time = t_last;

    if (opts.fast_phase) {
        // Carrier phase by trapezoidal quadrature of its rate over the samples.
        double delta0 = 0.0;
        if (const auto* mech = std::get_if<MechState>(&sc.initial)) {
            delta0 = std::atan2(-mech->v1, model.unit().Omega * mech->phi1);
        }
        tr.fast_phase.reserve(tr.size());
        double prev_rate = 0.0;
        for (std::size_t k = 0; k < tr.size(); ++k) {
            const auto rate = fast_phase_rate(tr.slow[k], tr.currents[k], model);
            const double r = rate.value_or(prev_rate);
            if (k == 0) {
                tr.fast_phase.push_back(delta0);
            } else {
                tr.fast_phase.push_back(tr.fast_phase.back() +
                                        0.5 * (prev_rate + r) * (tr.times[k] - tr.times[k - 1]));
            }
            prev_rate = r;
        }
    }
    warn_saturation(tr, sc.label);
    return tr;
}

// ---------------------------------------------------------------------------
// Comparison

double interpolate(const std::vector<double>& times, const std::vector<double>& values, double t) {
    if (times.empty() || times.size() != values.size()) {
        throw std::invalid_argument("interpolate: empty or mismatched series");
    }
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
}

std::optional<double> first_partition_crossing(const Trajectory& tr, double level) {
    for (std::size_t k = 0; k < tr.size(); ++k) {
        if (tr.descriptors[k].defined && std::abs(tr.descriptors[k].P) >= level) return tr.times[k];
    }
    return std::nullopt;
}

namespace {

double median_spacing(const std::vector<double>& t) {
    if (t.size() < 2) return 0.0;
    std::vector<double> d(t.size() - 1);
    for (std::size_t k = 1; k < t.size(); ++k) d[k - 1] = t[k] - t[k - 1];
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
    return d[d.size() / 2];
}

}  // namespace

ComparisonReport compare(const Trajectory& full, const Trajectory& slow,
                         std::optional<std::pair<double, double>> window) {
    if (full.size() == 0 || slow.size() == 0) throw std::invalid_argument("compare: empty trajectory");
    double t0 = std::max(full.times.front(), slow.times.front());
    double t1 = std::min(full.times.back(), slow.times.back());
    if (window) {
        t0 = std::max(t0, window->first);
        t1 = std::min(t1, window->second);
    }
    if (!(t1 >= t0)) throw std::invalid_argument("compare: trajectories do not overlap in time");

    auto series = [](const Trajectory& tr, bool want_p) {
        std::vector<double> v(tr.size());
        for (std::size_t k = 0; k < tr.size(); ++k) v[k] = want_p ? tr.descriptors[k].P : tr.descriptors[k].Q;
        return v;
    };
    const auto pf = series(full, true);
    const auto qf = series(full, false);
    const auto ps = series(slow, true);
    const auto qs = series(slow, false);

    double dt = std::min(median_spacing(full.times), median_spacing(slow.times));
    if (!(dt > 0.0)) dt = std::max(median_spacing(full.times), median_spacing(slow.times));
    const std::size_t n = dt > 0.0 ? static_cast<std::size_t>(std::floor((t1 - t0) / dt)) + 1 : 1;

    ComparisonReport rep;
    rep.t_begin = t0;
    rep.t_end = t1;
    double sp = 0.0;
    double sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = std::min(t0 + static_cast<double>(k) * dt, t1);
        const double ep = interpolate(full.times, pf, t) - interpolate(slow.times, ps, t);
        const double eq = interpolate(full.times, qf, t) - interpolate(slow.times, qs, t);
        sp += ep * ep;
        sq += eq * eq;
        rep.max_abs_P_error = std::max(rep.max_abs_P_error, std::abs(ep));
    }
    rep.rms_P = std::sqrt(sp / static_cast<double>(n));
    rep.rms_Q = std::sqrt(sq / static_cast<double>(n));
    rep.localization_time_full = first_partition_crossing(full, kLocalizationLevel);
    rep.localization_time_slow = first_partition_crossing(slow, kLocalizationLevel);
    rep.diverged = rep.rms_P > kDivergenceRms;
    return rep;
}

// ---------------------------------------------------------------------------
// Presets

namespace {

ControllerSpec open_loop_spec(double B, double tk, CoilPolarity polarity) {
    ControllerSpec spec;
    spec.kind = ControllerKind::OpenLoop;
    spec.profile = {0.001, B, tk, polarity, true};
    return spec;
}

ControllerSpec feedback_spec(double i0) {
    ControllerSpec spec;
    spec.kind = ControllerKind::Feedback;
    spec.feedback.i0 = i0;
    return spec;
}

Scenario mech_preset(std::string label, MagnetKit kit, MechState init, ControllerSpec ctl, double t_end) {
    return {std::move(label), preset(kit), init, ctl, t_end, 1e-3};
}

Scenario slow_preset(std::string label, double delta0, ControllerSpec ctl, double t_end) {
    return {std::move(label), preset(MagnetKit::Small), SlowState{30.0, 0.02, delta0}, ctl, t_end, 1e-3};
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig5", "fig7", "fig8", "fig10", "fig12_anti", "fig12_in", "fig13_anti", "fig13_rot", "fig13_in"};
}

Scenario preset_scenario(std::string_view name) {
    const auto fig10_law = open_loop_spec(0.4, 11.236, CoilPolarity::Opposed);
    if (name == "fig5") {
        return mech_preset("fig5", MagnetKit::Large, {0.568, 0.0, -0.557, -5.166e-3},
                           open_loop_spec(0.055, 40.0, CoilPolarity::Opposed), 20.0);
    }
    if (name == "fig7") {
        return mech_preset("fig7", MagnetKit::Large, {-0.545, 0.0, 0.580, 0.0},
                           open_loop_spec(0.08, 38.6, CoilPolarity::SingleCoil), 40.0);
    }
    if (name == "fig8") {
        return mech_preset("fig8", MagnetKit::Large, {-0.697, 0.0, 0.404, 0.0},
                           open_loop_spec(0.1, 10.31, CoilPolarity::SingleCoil), 12.0);
    }
    if (name == "fig10") {
        return mech_preset("fig10", MagnetKit::Small, {-0.660, 0.0, 0.627, 0.0}, fig10_law, 12.0);
    }
    if (name == "fig12_anti") return slow_preset("fig12_anti", kPi - 0.001, fig10_law, 15.0);
    if (name == "fig12_in") return slow_preset("fig12_in", -0.001, fig10_law, 15.0);
    if (name == "fig13_anti") return slow_preset("fig13_anti", kPi - 0.001, feedback_spec(0.35), 40.0);
    if (name == "fig13_rot") return slow_preset("fig13_rot", kPi / 2.0 - 0.001, feedback_spec(0.5), 40.0);
    if (name == "fig13_in") return slow_preset("fig13_in", -0.001, feedback_spec(0.35), 40.0);

    std::string list;
    for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown preset '" + std::string(name) + "' (available: " + list + ")");
}

// ---------------------------------------------------------------------------
// Linear beat equations

LinearBeatTrajectory integrate_linearized(BeatMode mode, const SlowState& init,
                                          const ControllerSpec& controller, double t_end,
                                          double output_dt, const PendulumModel& m,
                                          const SlowFlowOptions& flow) {
    if (!(t_end > 0.0) || !(output_dt > 0.0)) {
        throw std::invalid_argument("integrate_linearized: t_end and output_dt must be positive");
    }
    if (!(init.E > 0.0)) throw std::invalid_argument("integrate_linearized: E(0) must be positive");
    const double delta_lin = mode == BeatMode::Antiphase ? kPi : 0.0;
    constexpr double kEnergyFloor = 1e-3;

    auto currents = [&](double t, double E) { return slow_currents(controller, t, E, delta_lin); };
    const auto clamp_p = [&](double p) { return std::clamp(p, -1.0 + flow.eps_P, 1.0 - flow.eps_P); };

    // x = (P, P', E)
    auto system = [&](const State3& x, State3& dxdt, double t) {
        const double E = std::max(x[2], kEnergyFloor);
        const CurrentPair cur = currents(t, E);
        const LinearBeatCoeffs c = linearized_coeffs(mode, E, cur, m);
        const SlowRates r = slow_rhs({E, clamp_p(x[0]), delta_lin}, cur, m, flow);
        dxdt = {x[1], c.forcing - c.damping * x[1] - c.stiffness * x[0], r.dE};
    };

    const double dP0 = slow_rhs(init, currents(0.0, init.E), m, flow).dP;
    State3 x{init.P, dP0, init.E};

    LinearBeatTrajectory out;
    out.mode = mode;
    const std::size_t n_out = sample_count(t_end, output_dt);
    auto record = [&](double t, const State3& xs) {
        out.times.push_back(t);
        out.P.push_back(xs[0]);
        out.dP.push_back(xs[1]);
        out.E.push_back(xs[2]);
    };
    record(0.0, x);

    auto stepper = odeint::make_dense_output(1e-12, 1e-10, odeint::runge_kutta_dopri5<State3>());
    stepper.initialize(x, 0.0, std::min(1e-3, output_dt));
    std::size_t next = 1;
    State3 xs;
    while (next < n_out) {
        stepper.do_step(system);
        while (next < n_out && static_cast<double>(next) * output_dt <= stepper.current_time()) {
            stepper.calc_state(static_cast<double>(next) * output_dt, xs);
            record(static_cast<double>(next) * output_dt, xs);
            ++next;
        }
        if (!all_finite(stepper.current_state()) || stepper.current_state()[2] < kEnergyFloor) break;
    }
    return out;
}

}  // namespace penduflow
