#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "penduflow/plant.hpp"
#include "penduflow/sim.hpp"

using namespace penduflow;

namespace {

const PhysicalParams kLarge = preset(MagnetKit::Large);

PhysicalParams frictionless(PhysicalParams p) {
    p.c1 = p.c2 = p.ce = 0.0;
    return p;
}

PhysicalParams decoupled(PhysicalParams p) {
    p = frictionless(p);
    p.ke = 0.0;
    return p;
}

}  // namespace

TEST_CASE("magnetic potential: zero, width point and asymptote") {
    CHECK(magnetic_potential(0.0, kLarge) == 0.0);
    const double at_width = magnetic_potential(std::sqrt(kLarge.b), kLarge);
    CHECK(at_width == doctest::Approx(kLarge.a * (1.0 - std::exp(-1.0))).epsilon(1e-14));
    CHECK(at_width == doctest::Approx(5.080e-3).epsilon(5e-4));
    CHECK(std::abs(magnetic_potential(1.0, kLarge) - kLarge.a) / kLarge.a < 1e-13);
    CHECK(magnetic_potential(-0.3, kLarge) == magnetic_potential(0.3, kLarge));
    double prev = 0.0;
    for (double phi = 0.01; phi <= 1.0; phi += 0.01) {
        const double u = magnetic_potential(phi, kLarge);
        CHECK(u > prev);
        prev = u;
    }
}

TEST_CASE("magnetic torque: odd, peak at sqrt(b/2), derivative of the potential") {
    CHECK(magnetic_torque(0.0, kLarge) == 0.0);
    CHECK(magnetic_torque(-0.3, kLarge) == -magnetic_torque(0.3, kLarge));
    const double phi_star = std::sqrt(kLarge.b / 2.0);
    CHECK(phi_star == doctest::Approx(0.12412).epsilon(1e-4));
    const double peak = magnetic_torque(phi_star, kLarge);
    CHECK(peak == doctest::Approx(3.927e-2).epsilon(5e-4));
    CHECK(magnetic_torque(phi_star * 0.99, kLarge) < peak);
    CHECK(magnetic_torque(phi_star * 1.01, kLarge) < peak);

    const double h = 1e-7;
    for (double phi = -1.0; phi <= 1.0; phi += 0.05) {
        const double fd = (magnetic_potential(phi + h, kLarge) - magnetic_potential(phi - h, kLarge)) / (2 * h);
        const double m = magnetic_torque(phi, kLarge);
        CAPTURE(phi);
        CHECK(std::abs(fd - m) <= 1e-6 * std::max(std::abs(m), 1e-3));
    }
}

TEST_CASE("plant_rhs at rest is zero") {
    const PendulumModel m(kLarge);
    const StateDerivative d = plant_rhs({}, {}, m);
    CHECK(d.dphi1 == 0.0);
    CHECK(d.dv1 == 0.0);
    CHECK(d.dphi2 == 0.0);
    CHECK(d.dv2 == 0.0);
}

TEST_CASE("plant_rhs: hand substitution without coupling, friction or current") {
    const PendulumModel m(decoupled(kLarge));
    const double om2 = m.unit().Omega * m.unit().Omega;
    MechState s;
    s.phi1 = 0.1;
    const StateDerivative d = plant_rhs(s, {}, m);
    CHECK(d.dphi1 == 0.0);
    CHECK(d.dv1 == doctest::Approx(-om2 * (0.1 - 0.1 * 0.1 * 0.1 / 6.0)).epsilon(1e-14));
    CHECK(d.dv2 == 0.0);
}

TEST_CASE("plant_rhs: term-by-term oracle for the coupled, driven, moving plant") {
    const PendulumModel m(kLarge);
    const UnitlessParams u = m.unit();
    const MechState s{0.2, -0.7, -0.15, 0.4};
    const CurrentPair cur{0.12, -0.05};
    const double om = u.Omega;
    const double M1 = 2 * kLarge.a / kLarge.b * std::exp(-0.04 / kLarge.b) * 0.2;
    const double f1 = 2 * om * (u.zeta1 * -1.0 + u.alpha * (-0.7 - 0.4)) +
                      om * om * (u.beta * (0.2 + 0.15) - 0.008 / 6.0) - 0.12 / kLarge.J * M1;
    const StateDerivative d = plant_rhs(s, cur, m);
    CHECK(d.dphi1 == -0.7);
    CHECK(d.dv1 == doctest::Approx(-om * om * 0.2 - f1).epsilon(1e-13));
}

TEST_CASE("plant_rhs is equivariant under the pendulum swap") {
    PhysicalParams p = kLarge;
    PhysicalParams q = p;
    std::swap(q.c1, q.c2);
    const PendulumModel m(p);
    const PendulumModel ms(q);
    const MechState s{0.3, 0.2, -0.1, -0.5};
    const MechState sw{-0.1, -0.5, 0.3, 0.2};
    const CurrentPair cur{0.07, -0.2};
    const StateDerivative d = plant_rhs(s, cur, m);
    const StateDerivative e = plant_rhs(sw, {cur.i2, cur.i1}, ms);
    CHECK(d.dphi1 == e.dphi2);
    CHECK(d.dv1 == doctest::Approx(e.dv2).epsilon(1e-15));
    CHECK(d.dphi2 == e.dphi1);
    CHECK(d.dv2 == doctest::Approx(e.dv1).epsilon(1e-15));
}

TEST_CASE("stuck pendulum has zero derivatives") {
    const PendulumModel m(kLarge);
    MechState s{0.002, 0.0, 0.3, 0.0, true, false};
    const StateDerivative d = plant_rhs(s, {}, m);
    CHECK(d.dphi1 == 0.0);
    CHECK(d.dv1 == 0.0);
    CHECK(d.dv2 != 0.0);
}

TEST_CASE("stick-slip: rest persists under friction, frictionless never sticks") {
    const PendulumModel m(kLarge);
    const MechState rest{};
    const MechState next = stick_slip_update(rest, rest, {}, m);
    CHECK(next.stuck1);
    CHECK(next.stuck2);
    CHECK(next.v1 == 0.0);
    const MechState again = stick_slip_update(next, next, {}, m);
    CHECK(again.stuck1);

    const PendulumModel free(frictionless(kLarge));
    const MechState after = stick_slip_update(rest, rest, {}, free);
    CHECK_FALSE(after.stuck1);
    CHECK_FALSE(after.stuck2);
    // A velocity reversal does not engage sticking either.
    const MechState a{0.1, 0.01, 0.0, 0.0};
    const MechState b{0.1, -0.01, 0.0, 0.0};
    CHECK_FALSE(stick_slip_update(a, b, {}, free).stuck1);
}

TEST_CASE("stick-slip: velocity reversal sticks only inside the static limit") {
    const PendulumModel m(kLarge);
    const double limit = 2 * m.unit().Omega * m.unit().zeta1;
    const double om2 = m.unit().Omega * m.unit().Omega;
    // Restoring acceleration below the limit: sticks.
    const double phi_in = 0.5 * limit / om2;
    const MechState a{phi_in, 1e-4, 0.0, 0.0};
    const MechState b{phi_in, -1e-4, 0.0, 0.0};
    const MechState s = stick_slip_update(a, b, {}, m);
    CHECK(s.stuck1);
    CHECK(s.v1 == 0.0);
    // Far outside the limit: keeps moving.
    const MechState c{0.3, 1e-4, 0.0, 0.0};
    const MechState d{0.3, -1e-4, 0.0, 0.0};
    CHECK_FALSE(stick_slip_update(c, d, {}, m).stuck1);
    // Stuck pendulum releases once the applied torque exceeds the limit.
    MechState stuck{phi_in, 0.0, 0.0, 0.0, true, false};
    CHECK(stick_slip_update(stuck, stuck, {}, m).stuck1);
    stuck.phi1 = 2.0 * limit / om2;
    const MechState released = stick_slip_update(stuck, stuck, {}, m);
    CHECK_FALSE(released.stuck1);
    CHECK(released.v1 == 0.0);
}

TEST_CASE("stick release under a ramped coil current matches a smoothed-friction reference") {
    // Pendulum 1 rests at a small angle where gravity stays inside the static
    // friction band; an attracting current ramp eventually tears it loose.
    Scenario sc;
    sc.label = "release";
    sc.params = kLarge;
    sc.initial = MechState{0.003, 0.0, 0.0, 0.0};
    sc.controller.kind = ControllerKind::OpenLoop;
    sc.controller.profile = {0.0, 0.5, 4.0, CoilPolarity::SingleCoil, true};
    sc.t_end = 2.0;
    sc.output_dt = 1e-3;

    FullRunOptions filippov;
    filippov.h = 2e-5;
    FullRunOptions smooth = filippov;
    smooth.friction.mode = FrictionMode::Smoothed;

    const Trajectory a = integrate_full(sc, filippov);
    const Trajectory b = integrate_full(sc, smooth);
    REQUIRE(a.size() == b.size());

    // Find the release in the Filippov run.
    std::size_t release = 0;
    for (std::size_t k = 1; k < a.size(); ++k) {
        if (a.mech[k - 1].stuck1 && !a.mech[k].stuck1) {
            release = k;
            break;
        }
    }
    REQUIRE(release > 0);
    CHECK(a.mech[release - 1].v1 == 0.0);
    const double t_release = a.times[release];
    CHECK(t_release > 0.2);
    CHECK(t_release < 1.9);

    // Past the critical current the repelling coil pushes the pendulum away from the origin.
    CHECK(a.mech.back().phi1 > 0.003);
    CHECK(b.mech.back().phi1 > 0.003);

    double sup = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sup = std::max(sup, std::abs(a.mech[k].phi1 - b.mech[k].phi1));
    const double travel = std::abs(a.mech.back().phi1 - 0.003);
    CAPTURE(sup);
    CAPTURE(travel);
    CHECK(travel > 1e-3);
    CHECK(sup < 0.05 * travel + 1e-5);
}

TEST_CASE("quadratic potential: origin, diagonal and deepening by negative currents") {
    const PendulumModel m(kLarge);
    const double om2 = m.unit().Omega * m.unit().Omega;
    CHECK(quadratic_potential(0.0, 0.0, {0.3, -0.2}, m) == 0.0);
    CHECK(quadratic_potential(0.2, 0.2, {}, m) == doctest::Approx(om2 * 0.04).epsilon(1e-14));
    CHECK(quadratic_potential(0.1, 0.1, {-0.1, -0.1}, m) > quadratic_potential(0.1, 0.1, {}, m));
}

TEST_CASE("eigenfrequencies: zero currents and the equal-current critical point") {
    const PendulumModel m(kLarge);
    const UnitlessParams u = m.unit();
    const SquaredFrequencies w = eigenfrequencies({}, m);
    CHECK(std::sqrt(w.omega1_sq) == doctest::Approx(u.Omega).epsilon(1e-13));
    CHECK(std::sqrt(w.omega2_sq) == doctest::Approx(std::sqrt(1 + 2 * u.beta) * u.Omega).epsilon(1e-13));
    CHECK(std::sqrt(w.omega2_sq) == doctest::Approx(9.891).epsilon(1e-3));

    for (double i : {-0.2, 0.05, 0.1}) {
        const SquaredFrequencies e = eigenfrequencies({i, i}, m);
        CHECK(e.omega1_sq == doctest::Approx(u.Omega * u.Omega - 2 * m.magnetic_gain() * i).epsilon(1e-12));
    }
    const double i_star = kLarge.b * kLarge.mgs / (2 * kLarge.a);
    CHECK(i_star == doctest::Approx(0.1120).epsilon(5e-4));
    CHECK(std::abs(eigenfrequencies({i_star, i_star}, m).omega1_sq) < 1e-10);
}

TEST_CASE("eigenfrequencies equal the Hessian eigenvalues of the quadratic potential") {
    const PendulumModel m(kLarge);
    const UnitlessParams u = m.unit();
    const double om2 = u.Omega * u.Omega;
    const double g = m.magnetic_gain();
    for (int r = 0; r < 21; ++r) {
        for (int c = 0; c < 21; ++c) {
            const CurrentPair cur{-0.3 + 0.03 * r, -0.3 + 0.03 * c};
            // Hessian of V written out from its definition.
            const auto [lo, hi] = oracle::symmetric_eigen(om2 * (1 + u.beta) - 2 * g * cur.i1, -om2 * u.beta,
                                                          om2 * (1 + u.beta) - 2 * g * cur.i2);
            const SquaredFrequencies w = eigenfrequencies(cur, m);
            CHECK(w.omega1_sq == doctest::Approx(lo).epsilon(1e-10).scale(om2));
            CHECK(w.omega2_sq == doctest::Approx(hi).epsilon(1e-10).scale(om2));
            // Classification agrees with the oracle's signs away from boundaries.
            if (std::abs(lo) > 1e-9 && std::abs(hi) > 1e-9) {
                const int positive = (lo > 0) + (hi > 0);
                const EquilibriumKind expected = positive == 2   ? EquilibriumKind::Minimum
                                                 : positive == 1 ? EquilibriumKind::Saddle
                                                                 : EquilibriumKind::Maximum;
                CHECK(classify_equilibrium(cur, m).kind == expected);
            }
        }
    }
}

TEST_CASE("equilibrium classes at the published reference currents") {
    const PendulumModel m(kLarge);
    CHECK(classify_equilibrium({-0.1, -0.1}, m).kind == EquilibriumKind::Minimum);
    CHECK(classify_equilibrium({0.3, 0.3}, m).kind == EquilibriumKind::Maximum);
    CHECK(classify_equilibrium({0.3, -0.3}, m).kind == EquilibriumKind::Saddle);
    const EquilibriumClass c = classify_equilibrium({-0.1, -0.1}, m);
    CHECK_FALSE(c.boundary);
}

TEST_CASE("boundary cells are flagged and mapped to the lower-stability class") {
    const PendulumModel m(kLarge);
    const double i_star = kLarge.b * kLarge.mgs / (2 * kLarge.a);
    // Pick the current that puts omega1² within tolerance of zero.
    const EquilibriumClass c = classify_equilibrium({i_star, i_star}, m, 1e-9);
    CHECK(c.boundary);
    CHECK(c.kind == EquilibriumKind::Saddle);
}

TEST_CASE("stability map covers the grid with i2 varying fastest") {
    const PendulumModel m(kLarge);
    const auto cells = stability_map(41, 0.3, m);
    REQUIRE(cells.size() == 41u * 41u);
    CHECK(cells.front().current.i1 == doctest::Approx(-0.3));
    CHECK(cells.front().current.i2 == doctest::Approx(-0.3));
    CHECK(cells[1].current.i1 == doctest::Approx(-0.3));
    CHECK(cells[1].current.i2 == doctest::Approx(-0.285));
    CHECK(cells.back().current.i1 == doctest::Approx(0.3));
    // Nearest cell to (−0.1, −0.1).
    std::size_t best = 0;
    double dist = 1e9;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const double d = std::hypot(cells[k].current.i1 + 0.1, cells[k].current.i2 + 0.1);
        if (d < dist) {
            dist = d;
            best = k;
        }
    }
    CHECK(cells[best].cls.kind == EquilibriumKind::Minimum);
    CHECK_THROWS_AS(stability_map(1, 0.3, m), std::invalid_argument);
    CHECK_THROWS_AS(stability_map(11, 0.0, m), std::invalid_argument);
}

TEST_CASE("current saturation clips and reports") {
    bool clipped = false;
    const CurrentPair c = saturate({1.5, -0.2}, 1.0, &clipped);
    CHECK(clipped);
    CHECK(c.i1 == 1.0);
    CHECK(c.i2 == -0.2);
    saturate({0.5, -0.5}, 1.0, &clipped);
    CHECK_FALSE(clipped);
}

TEST_CASE("linear decoupled pendulum follows the closed-form harmonic solution") {
    Scenario sc;
    sc.params = decoupled(kLarge);
    sc.initial = MechState{0.1, 0.0, 0.0, 0.0};
    sc.t_end = 10.0;
    sc.output_dt = 1e-3;
    FullRunOptions opts;
    opts.gravity = GravityModel::Linear;
    const Trajectory tr = integrate_full(sc, opts);
    const double om = derive_unitless(sc.params).Omega;
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        worst = std::max(worst, std::abs(tr.mech[k].phi1 - 0.1 * std::cos(om * tr.times[k])));
    }
    CAPTURE(worst);
    CHECK(worst < 1e-8);
    // Same step, same scheme: the residual against an independent RK4 is round-off.
    const auto ref = oracle::harmonic_rk4(0.1, 0.0, om, 10.0, 1e-4);
    CHECK(tr.mech.back().phi1 == doctest::Approx(ref[0]).epsilon(1e-10).scale(0.1));
}

TEST_CASE("conservative plant keeps its energy integral over 100 s") {
    Scenario sc;
    sc.params = frictionless(kLarge);
    sc.initial = MechState{0.5, 0.0, -0.2, 0.3};
    sc.t_end = 100.0;
    sc.output_dt = 0.1;
    const Trajectory tr = integrate_full(sc);
    const UnitlessParams u = derive_unitless(sc.params);
    const double e0 = conservative_energy(tr.mech.front(), u);
    double worst = 0.0;
    for (const auto& s : tr.mech) worst = std::max(worst, std::abs(conservative_energy(s, u) - e0) / e0);
    CAPTURE(worst);
    CHECK(worst < 1e-6);
    CHECK_FALSE(tr.mech.back().stuck1);
}
