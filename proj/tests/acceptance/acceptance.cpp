// Acceptance suite: one PASS/FAIL line per criterion with its tolerance and
// runtime budget. Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "penduflow/bessel.hpp"
#include "penduflow/descriptors.hpp"
#include "penduflow/params.hpp"
#include "penduflow/plant.hpp"
#include "penduflow/sim.hpp"
#include "penduflow/slowflow.hpp"

using namespace penduflow;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> notes;  ///< informational lines, not part of the verdict
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<double> partition_series(const Trajectory& tr) {
    std::vector<double> out;
    out.reserve(tr.size());
    for (const auto& d : tr.descriptors) out.push_back(d.P);
    return out;
}

// 1 ------------------------------------------------------------------------
Outcome table_values() {
    struct Row {
        MagnetKit kit;
        double Omega, beta, zeta1, zeta2, alpha;
    };
    Outcome o;
    int mismatches = 0;
    for (const Row& r : {Row{MagnetKit::Large, 9.276, 6.849e-2, 1.985e-2, 1.270e-2, 7.636e-4},
                         Row{MagnetKit::Small, 9.403, 7.969e-2, 2.918e-2, 2.534e-2, 9.009e-4}}) {
        const UnitlessParams u = derive_unitless(preset(r.kit));
        const double got[] = {u.Omega, u.beta, u.zeta1, u.zeta2, u.alpha};
        const double want[] = {r.Omega, r.beta, r.zeta1, r.zeta2, r.alpha};
        for (int k = 0; k < 5; ++k) mismatches += oracle::round_sig(got[k], 3) != oracle::round_sig(want[k], 3);
    }
    o.pass = mismatches == 0;
    o.detail = std::to_string(10 - mismatches) + "/10 values agree to 3 significant figures";
    return o;
}

// 2 ------------------------------------------------------------------------
Outcome linear_spectra() {
    Outcome o;
    double worst_freq = 0.0;
    for (MagnetKit kit : {MagnetKit::Large, MagnetKit::Small}) {
        const PendulumModel m(preset(kit));
        const UnitlessParams u = m.unit();
        const SquaredFrequencies w = eigenfrequencies({}, m);
        const double w1 = std::sqrt(w.omega1_sq), w2 = std::sqrt(w.omega2_sq);
        worst_freq = std::max(worst_freq, std::abs(w1 - u.Omega) / u.Omega);
        const double anti = std::sqrt(1 + 2 * u.beta) * u.Omega;
        worst_freq = std::max(worst_freq, std::abs(w2 - anti) / anti);
    }
    const PendulumModel m(preset(MagnetKit::Large));
    const UnitlessParams u = m.unit();
    const double om2 = u.Omega * u.Omega;
    const double g = m.magnetic_gain();
    int checked = 0, disagree = 0;
    for (int r = 0; r < 41; ++r) {
        for (int c = 0; c < 41; ++c) {
            const CurrentPair cur{-0.3 + 0.015 * r, -0.3 + 0.015 * c};
            const auto [lo, hi] = oracle::symmetric_eigen(om2 * (1 + u.beta) - 2 * g * cur.i1, -om2 * u.beta,
                                                          om2 * (1 + u.beta) - 2 * g * cur.i2);
            const EquilibriumClass cls = classify_equilibrium(cur, m);
            if (cls.boundary || std::abs(lo) < 1e-9 || std::abs(hi) < 1e-9) continue;
            const int positive = (lo > 0) + (hi > 0);
            const EquilibriumKind expected = positive == 2   ? EquilibriumKind::Minimum
                                             : positive == 1 ? EquilibriumKind::Saddle
                                                             : EquilibriumKind::Maximum;
            ++checked;
            disagree += cls.kind != expected;
        }
    }
    o.pass = worst_freq <= 1e-12 && disagree == 0 && checked > 0;
    o.detail = "max rel freq error " + fmt("%.2e", worst_freq) + " (tol 1e-12); " + std::to_string(checked - disagree) +
               "/" + std::to_string(checked) + " grid classes match the Hessian oracle";
    return o;
}

// 3 ------------------------------------------------------------------------
Outcome conservation() {
    Outcome o;
    double worst = 0.0;
    for (MagnetKit kit : {MagnetKit::Large, MagnetKit::Small}) {
        Scenario sc;
        sc.params = preset(kit);
        sc.params.c1 = sc.params.c2 = sc.params.ce = 0.0;
        sc.initial = MechState{0.5, 0.0, -0.2, 0.3};
        sc.t_end = 100.0;
        sc.output_dt = 0.01;
        const Trajectory tr = integrate_full(sc);
        const UnitlessParams u = derive_unitless(sc.params);
        const double e0 = conservative_energy(tr.mech.front(), u);
        for (const auto& s : tr.mech) worst = std::max(worst, std::abs(conservative_energy(s, u) - e0) / e0);
    }
    o.pass = worst <= 1e-6;
    o.detail = "max rel energy drift " + fmt("%.2e", worst) + " over 100 s, both kits (tol 1e-6)";
    return o;
}

// 4 ------------------------------------------------------------------------
Outcome roundtrip() {
    Outcome o;
    const double om = derive_unitless(preset(MagnetKit::Large)).Omega;
    std::mt19937_64 rng(20240101);
    std::uniform_real_distribution<double> uE(0.01, 60.0), uP(-0.999, 0.999), uA(-kPi, kPi);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double E = uE(rng), P = uP(rng), D = uA(rng), dl = uA(rng);
        const Descriptors d = descriptors_from_state(state_from_slow(E, P, D, dl, om), om);
        worst = std::max({worst, std::abs(d.E - E) / E, std::abs(d.P - P), std::abs(d.Q - std::cos(D))});
    }
    o.pass = worst <= 1e-12;
    o.detail = "max error " + fmt("%.2e", worst) + " on 1000 tuples (tol 1e-12)";
    return o;
}

// 5 ------------------------------------------------------------------------
Outcome fig5_transfer() {
    Outcome o;
    const Trajectory tr = integrate_full(preset_scenario("fig5"));
    std::size_t hit = tr.size();
    for (std::size_t k = 0; k < tr.size(); ++k) {
        if (tr.descriptors[k].P <= -0.9) {
            hit = k;
            break;
        }
    }
    if (hit == tr.size()) {
        o.pass = false;
        o.detail = "P never reached -0.9";
        return o;
    }
    double maxQ = -1.0;
    for (std::size_t k = 0; k <= hit; ++k) maxQ = std::max(maxQ, tr.descriptors[k].Q);
    const double t = tr.times[hit];
    o.pass = t >= 8.0 && t <= 16.0 && maxQ < 0.0;
    o.detail = "P first reaches -0.9 at t = " + fmt("%.3f", t) + " s (window [8, 16]); max Q before it " +
               fmt("%.4f", maxQ) + " (must be < 0)";
    return o;
}

// 6 ------------------------------------------------------------------------
Outcome averaging_fidelity() {
    Outcome o;
    const Scenario sc = preset_scenario("fig5");
    const ComparisonReport r = compare(integrate_full(sc), integrate_slow(sc), std::make_pair(0.0, 12.0));
    o.pass = r.rms_P <= 0.1 && r.rms_Q <= 0.1;
    o.detail = "rms_P " + fmt("%.4f", r.rms_P) + ", rms_Q " + fmt("%.4f", r.rms_Q) + " over [0, 12] s (tol 0.1)";
    return o;
}

// 7 ------------------------------------------------------------------------
Outcome streamline_topology() {
    Outcome o;
    PhysicalParams cons = preset(MagnetKit::Large);
    cons.c1 = cons.c2 = cons.ce = 0.0;
    const auto pts = stationary_points(20.0, {}, StreamGrid{}, PendulumModel(cons));
    int found = 0;
    for (double target : {-kPi, 0.0, kPi}) {
        for (const auto& s : pts) {
            if (std::abs(s.Delta - target) <= 1e-6 && std::abs(s.P) <= 1e-6) {
                ++found;
                break;
            }
        }
    }
    const auto diss = stationary_points(20.0, {}, StreamGrid{}, PendulumModel(preset(MagnetKit::Large)));
    int anti = 0, unstable = 0;
    for (const auto& s : diss) {
        if (std::abs(std::abs(s.Delta) - kPi) < 0.1 && std::abs(s.P) < 0.2) {
            ++anti;
            unstable += s.eig1.real() > 0.0 && s.eig2.real() > 0.0 && s.kind == StationaryKind::UnstableSpiral;
        }
    }
    o.pass = found == 3 && anti > 0 && unstable == anti;
    o.detail = std::to_string(found) + "/3 conservative points within 1e-6; " + std::to_string(unstable) + "/" +
               std::to_string(anti) + " dissipative antiphase points are unstable spirals";
    return o;
}

// 8 ------------------------------------------------------------------------
Outcome bessel_accuracy() {
    Outcome o;
    double worst = 0.0;
    for (double z = 0.0; z <= 15.0 + 1e-12; z += 0.05) {
        for (int n : {0, 1}) {
            const double ref = oracle::bessel_series(n, z, 40);
            if (ref == 0.0) {
                worst = std::max(worst, std::abs(bessel_i(n, z)));
                continue;
            }
            worst = std::max(worst, std::abs(bessel_i(n, z) - ref) / ref);
        }
    }
    bool monotone = true;
    double p0 = -1.0, p1 = -1.0;
    for (double z = 0.0; z <= 50.0 + 1e-12; z += 0.01) {
        const double i0 = bessel_i(0, z), i1 = bessel_i(1, z);
        monotone = monotone && i0 > p0 && i1 > p1 && i0 - i1 > 0.0;
        p0 = i0;
        p1 = i1;
    }
    o.pass = worst <= 1e-10 && monotone;
    o.detail = "max rel error " + fmt("%.2e", worst) + " on [0, 15] (tol 1e-10); monotone with I0 > I1 to z = 50: " +
               (monotone ? "yes" : "no");
    return o;
}

// 9 ------------------------------------------------------------------------
Outcome feedback_steering() {
    Outcome o;
    std::ostringstream detail;
    bool slow_ok = true, full_ok = true;
    for (const char* name : {"fig13_anti", "fig13_rot", "fig13_in"}) {
        Scenario sc = preset_scenario(name);
        sc.controller.feedback.i0 = 0.35;
        const Trajectory slow = integrate_slow(sc);
        const double t_last = slow.times.back();
        double mean = 0.0;
        int n = 0;
        for (std::size_t k = 0; k < slow.size(); ++k) {
            if (slow.times[k] >= t_last - 5.0) {
                mean += slow.slow[k].P;
                ++n;
            }
        }
        mean /= n;
        slow_ok = slow_ok && mean <= -0.8;

        Scenario fsc = sc;
        fsc.controller.kind = ControllerKind::FeedbackDecayed;
        fsc.controller.feedback.eta = 0.2;
        const Trajectory full = integrate_full(fsc);
        const auto t_full = first_partition_crossing(full, 0.8);
        double p_full = 0.0;
        if (t_full) p_full = interpolate(full.times, partition_series(full), *t_full);
        const bool same_sign = t_full.has_value() && p_full < 0.0;
        full_ok = full_ok && same_sign;

        const auto t_slow = first_partition_crossing(slow, 0.8);
        const double p_slow = t_slow ? interpolate(slow.times, partition_series(slow), *t_slow) : 0.0;
        detail << name << ": slow mean P " << fmt("%.3f", mean) << " (<= -0.8), full first |P|>=0.8 "
               << (t_full ? fmt("%+.2f", p_full) + " at " + fmt("%.2f", *t_full) + " s" : std::string("never"))
               << "; ";
        o.notes.push_back(std::string(name) + ": full-model first crossing sign " +
                          (t_full ? (p_full < 0 ? "-" : "+") : "none") + ", slow-flow first crossing sign " +
                          (t_slow ? (p_slow < 0 ? "-" : "+") : "none") +
                          (t_full && t_slow && (p_full < 0) == (p_slow < 0) ? " (models agree)"
                                                                           : " (models differ)"));
    }
    o.pass = slow_ok && full_ok;
    o.detail = detail.str() + "full sign must be negative";
    return o;
}

// 10 -----------------------------------------------------------------------
Outcome linear_beats() {
    Outcome o;
    std::ostringstream detail;
    for (const auto& [name, mode] : {std::pair{"fig12_anti", BeatMode::Antiphase}, std::pair{"fig12_in", BeatMode::Inphase}}) {
        const Scenario sc = preset_scenario(name);
        const PendulumModel m(sc.params);
        const Trajectory slow = integrate_slow(sc);
        const LinearBeatTrajectory lin =
            integrate_linearized(mode, std::get<SlowState>(sc.initial), sc.controller, sc.t_end, sc.output_dt, m);
        const auto t08 = first_partition_crossing(slow, 0.8);
        const double t_stop = t08 ? *t08 : slow.times.back();
        double sum = 0.0;
        int n = 0;
        for (std::size_t k = 0; k < slow.size() && slow.times[k] <= t_stop; ++k) {
            const double e = interpolate(lin.times, lin.P, slow.times[k]) - slow.slow[k].P;
            sum += e * e;
            ++n;
        }
        const double rms = std::sqrt(sum / std::max(n, 1));
        o.pass = o.pass && t08.has_value() && rms <= 0.15;
        detail << name << " rms " << fmt("%.4f", rms) << " until t = " << fmt("%.2f", t_stop) << " s; ";
    }
    o.detail = detail.str() + "tol 0.15";
    return o;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "parameter derivation", 1e-3, table_values},
        {2, "linear spectra and equilibrium classes", 1.0, linear_spectra},
        {3, "energy conservation", 30.0, conservation},
        {4, "descriptor transform roundtrip", 1.0, roundtrip},
        {5, "fig5 energy transfer", 60.0, fig5_transfer},
        {6, "averaging fidelity", 60.0, averaging_fidelity},
        {7, "streamline topology", 10.0, streamline_topology},
        {8, "Bessel accuracy", 1.0, bessel_accuracy},
        {9, "feedback steering", 120.0, feedback_steering},
        {10, "linearized beat equations", 10.0, linear_beats},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("%s criterion %d: %s | %s | runtime %.4f s (limit %g s)%s\n", pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), o.detail.c_str(), secs, c.budget_s, in_time ? "" : " over budget");
        for (const auto& note : o.notes) std::printf("     info %d: %s\n", c.id, note.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
