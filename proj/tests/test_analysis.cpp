#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "coorb/analysis.hpp"
#include "coorb/equilibria.hpp"
#include "coorb/errors.hpp"
#include "coorb/integrator.hpp"

using namespace coorb;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SystemState three_body_sample(double t, const Vec2& p1, const Vec2& v1, const Vec2& p2,
                              const Vec2& v2) {
    SystemState s;
    s.t = t;
    s.bodies[0].gm = 1.0;
    s.bodies[1].position = p1;
    s.bodies[1].velocity = v1;
    s.bodies[2].position = p2;
    s.bodies[2].velocity = v2;
    return s;
}

// Moons on unit circles around the central body at the given polar angles,
// with circular counterclockwise velocities; enough for series bookkeeping.
SystemState moons_at_angles(double t, double theta1, double theta2) {
    const Vec2 p1(std::cos(theta1), std::sin(theta1));
    const Vec2 p2(std::cos(theta2), std::sin(theta2));
    const Vec2 v1(-std::sin(theta1), std::cos(theta1));
    const Vec2 v2(-std::sin(theta2), std::cos(theta2));
    return three_body_sample(t, p1, v1, p2, v2);
}

ResonantSeries series_from_zeta(const std::vector<double>& zeta, double dt = 1.0) {
    ResonantSeries s;
    for (std::size_t k = 0; k < zeta.size(); ++k) {
        s.t.push_back(dt * static_cast<double>(k));
        s.zeta.push_back(zeta[k]);
        s.delta_a.push_back(0.0);
        s.r_rel.push_back(1.0);
    }
    return s;
}

}  // namespace

TEST_CASE("osculating_elements: circular, eccentric, and radial-velocity states") {
    BodyState b;
    b.position = Vec2(1.0, 0.0);
    b.velocity = Vec2(0.0, 1.0);

    SUBCASE("unit circular orbit") {
        const OrbitalElements el = osculating_elements(b, 1.0);
        CHECK(el.a == 1.0);
        CHECK(el.e == 0.0);
        CHECK(el.longitude == 0.0);
    }

    SUBCASE("tangential speedup at periapsis") {
        b.velocity = Vec2(0.0, 1.1);
        const OrbitalElements el = osculating_elements(b, 1.0);
        CHECK(el.a == doctest::Approx(1.0 / 0.79).epsilon(1e-12));
        CHECK(el.e == doctest::Approx(0.21).epsilon(1e-12));
    }

    SUBCASE("state with a radial velocity component") {
        b.velocity = Vec2(0.3, 1.0);  // e vector comes out (0, -0.3)
        const OrbitalElements el = osculating_elements(b, 1.0);
        CHECK(el.a == doctest::Approx(1.0 / 0.91).epsilon(1e-12));
        CHECK(el.e == doctest::Approx(0.3).epsilon(1e-12));
    }

    SUBCASE("apoapsis start at longitude pi/2") {
        b.position = Vec2(0.0, 2.0);
        b.velocity = Vec2(-0.5, 0.0);
        const OrbitalElements el = osculating_elements(b, 1.0);
        CHECK(el.a == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
        CHECK(el.e == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(el.longitude == doctest::Approx(kPi / 2.0).epsilon(1e-12));
    }

    SUBCASE("error contracts") {
        CHECK_THROWS_AS(osculating_elements(b, 0.0), invalid_input);
        CHECK_THROWS_AS(osculating_elements(b, -1.0), invalid_input);
        BodyState at_center;
        CHECK_THROWS_AS(osculating_elements(at_center, 1.0), invalid_input);
        b.velocity = Vec2(0.0, 1.5);  // v^2 = 2.25 > 2 gm/r
        CHECK_THROWS_AS(osculating_elements(b, 1.0), numerical_error);
        b.velocity = Vec2(0.0, std::sqrt(2.0));  // parabolic
        CHECK_THROWS_AS(osculating_elements(b, 1.0), numerical_error);
    }
}

TEST_CASE("osculating_elements for a moon measures the central-relative orbit") {
    SystemState s;
    s.bodies[0].gm = 1.0;
    s.bodies[0].position = Vec2(5.0, -3.0);
    s.bodies[0].velocity = Vec2(0.1, -0.2);
    s.bodies[1].gm = 1e-3;
    s.bodies[1].position = s.bodies[0].position + Vec2(1.0, 0.0);
    s.bodies[1].velocity = s.bodies[0].velocity + Vec2(0.0, std::sqrt(1.001));
    s.bodies[2].gm = 2e-3;
    s.bodies[2].position = s.bodies[0].position + Vec2(0.0, 2.0);
    s.bodies[2].velocity = s.bodies[0].velocity + Vec2(-std::sqrt(1.002 / 2.0), 0.0);

    const OrbitalElements el1 = osculating_elements(s, 1);
    CHECK(el1.a == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(el1.e < 1e-14);
    CHECK(el1.longitude == doctest::Approx(0.0));

    const OrbitalElements el2 = osculating_elements(s, 2);
    CHECK(el2.a == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(el2.e < 1e-14);
    CHECK(el2.longitude == doctest::Approx(kPi / 2.0).epsilon(1e-12));

    CHECK_THROWS_AS(osculating_elements(s, 0), invalid_input);
    CHECK_THROWS_AS(osculating_elements(s, 3), invalid_input);
}

TEST_CASE("resonant_series: angle convention and basic fields") {
    TrajectoryRecord traj;
    traj.samples.push_back(moons_at_angles(0.0, 0.0, kPi / 3.0));
    traj.samples.push_back(moons_at_angles(1.0, 0.1, 0.1 + kPi / 3.0));

    const ResonantSeries series = resonant_series(traj);
    REQUIRE(series.t.size() == 2);
    CHECK(series.zeta[0] == doctest::Approx(kPi / 3.0).epsilon(1e-12));
    CHECK(series.zeta[1] == doctest::Approx(kPi / 3.0).epsilon(1e-12));
    // Unit circles, circular speeds: both osculating axes are exactly 1.
    CHECK(series.delta_a[0] == doctest::Approx(0.0));
    // Chord across 60 degrees of the unit circle has length 1.
    CHECK(series.r_rel[0] == doctest::Approx(1.0).epsilon(1e-12));

    TrajectoryRecord too_short;
    too_short.samples.push_back(moons_at_angles(0.0, 0.0, 1.0));
    CHECK_THROWS_AS(resonant_series(too_short), invalid_input);

    TrajectoryRecord degenerate = traj;
    degenerate.samples[0].bodies[1].position = Vec2(0.0, 0.0);
    CHECK_THROWS_AS(resonant_series(degenerate), numerical_error);
}

TEST_CASE("resonant_series: unwrap through the conjunction direction") {
    // Moon separation shrinks through zero: 20, 10, 2, -6 (=354), -14 (=346)
    // degrees. The unwrapped series must pass smoothly through zero instead of
    // jumping to 354.
    const std::vector<double> deg = {20.0, 10.0, 2.0, 354.0, 346.0};
    TrajectoryRecord traj;
    for (std::size_t k = 0; k < deg.size(); ++k) {
        traj.samples.push_back(
            moons_at_angles(static_cast<double>(k), 0.0, deg[k] * kPi / 180.0));
    }
    const ResonantSeries series = resonant_series(traj);
    const std::vector<double> expect_deg = {20.0, 10.0, 2.0, -6.0, -14.0};
    for (std::size_t k = 0; k < deg.size(); ++k) {
        CHECK(series.zeta[k] ==
              doctest::Approx(expect_deg[k] * kPi / 180.0).epsilon(1e-12));
    }
}

TEST_CASE("resonant_series: swapping the moon labels mirrors zeta and negates delta_a") {
    TrajectoryRecord traj;
    for (int k = 0; k < 24; ++k) {
        const double t = 0.3 * k;
        const double theta1 = 0.1 * k;
        const double theta2 = theta1 + 1.0 + 0.3 * std::sin(0.2 * k);
        SystemState s = moons_at_angles(t, theta1, theta2);
        // Different radii so delta_a is nonzero: moon2 circular at radius 1.1.
        s.bodies[2].position *= 1.1;
        s.bodies[2].velocity *= 1.0 / std::sqrt(1.1);
        traj.samples.push_back(s);
    }
    TrajectoryRecord swapped = traj;
    for (SystemState& s : swapped.samples) std::swap(s.bodies[1], s.bodies[2]);

    const ResonantSeries a = resonant_series(traj);
    const ResonantSeries b = resonant_series(swapped);
    for (std::size_t k = 0; k < a.t.size(); ++k) {
        CHECK(b.zeta[k] == doctest::Approx(2.0 * kPi - a.zeta[k]).epsilon(1e-12));
        CHECK(b.delta_a[k] == doctest::Approx(-a.delta_a[k]).epsilon(1e-12));
        CHECK(b.r_rel[k] == a.r_rel[k]);
    }
    CHECK(std::abs(a.delta_a[0]) > 1e-3);  // the check above is not vacuous
}

TEST_CASE("resonant_series flags unbound samples with NaN delta_a") {
    TrajectoryRecord traj;
    for (int k = 0; k < 4; ++k) traj.samples.push_back(moons_at_angles(k, 0.0, 1.0));
    traj.samples[2].bodies[2].velocity = Vec2(0.0, 3.0);  // hyperbolic kick
    const ResonantSeries series = resonant_series(traj);
    CHECK(std::isfinite(series.delta_a[0]));
    CHECK(std::isfinite(series.delta_a[1]));
    CHECK(std::isnan(series.delta_a[2]));
    CHECK(std::isfinite(series.delta_a[3]));
    CHECK(std::isfinite(series.zeta[2]));  // the angle itself is still fine
}

TEST_CASE("detect_swaps: sign changes of the window-averaged delta_a") {
    // Slow sign-flipping drift (period 500) buried under a fast per-orbit
    // wiggle (period 20, amplitude 3): the raw series crosses zero constantly,
    // the averaged one only at the seven true reversals.
    const std::size_t n = 2001;
    ResonantSeries series;
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        series.t.push_back(kk);
        series.zeta.push_back(kPi);  // unused by detect_swaps
        series.delta_a.push_back(10.0 * std::sin(2.0 * kPi * kk / 500.0) +
                                 3.0 * std::sin(2.0 * kPi * kk / 20.0));
        series.r_rel.push_back(5.0 + std::abs(10.0 * std::sin(2.0 * kPi * kk / 500.0)));
    }

    const std::vector<SwapEvent> events = detect_swaps(series, 40.0);
    REQUIRE(events.size() == 7);
    for (std::size_t e = 0; e < events.size(); ++e) {
        CHECK(std::abs(events[e].t_swap - 250.0 * static_cast<double>(e + 1)) < 2.0);
        const auto expect = (e % 2 == 0) ? SwapEvent::Direction::outer_to_inner
                                         : SwapEvent::Direction::inner_to_outer;
        CHECK(events[e].direction == expect);
        CHECK(events[e].min_distance == doctest::Approx(5.0).epsilon(1e-6));
    }

    SUBCASE("constant-sign series has no events") {
        ResonantSeries flat = series;
        for (double& v : flat.delta_a) v = 2.0 + 0.5 * std::sin(0.3 * v);
        CHECK(detect_swaps(flat, 40.0).empty());
    }

    SUBCASE("argument validation") {
        CHECK_THROWS_AS(detect_swaps(series, 0.0), invalid_input);
        CHECK_THROWS_AS(detect_swaps(series, -1.0), invalid_input);
        CHECK_THROWS_AS(detect_swaps(series, 2000.0), invalid_input);
        ResonantSeries one;
        one.t.push_back(0.0);
        one.delta_a.push_back(1.0);
        one.zeta.push_back(0.0);
        one.r_rel.push_back(1.0);
        CHECK_THROWS_AS(detect_swaps(one, 1.0), invalid_input);
    }
}

TEST_CASE("detect_swaps rides over NaN gaps in delta_a") {
    const std::size_t n = 2001;
    ResonantSeries series;
    for (std::size_t k = 0; k < n; ++k) {
        const double kk = static_cast<double>(k);
        series.t.push_back(kk);
        series.zeta.push_back(kPi);
        series.delta_a.push_back(10.0 * std::sin(2.0 * kPi * kk / 500.0));
        series.r_rel.push_back(5.0 + std::abs(10.0 * std::sin(2.0 * kPi * kk / 500.0)));
    }
    // Knock out samples straddling the third crossing (k = 750).
    for (std::size_t k = 740; k <= 760; ++k) series.delta_a[k] = kNaN;

    const std::vector<SwapEvent> events = detect_swaps(series, 40.0);
    REQUIRE(events.size() == 7);
    CHECK(std::abs(events[2].t_swap - 750.0) < 15.0);
    for (std::size_t e = 0; e < events.size(); ++e) {
        if (e == 2) continue;
        CHECK(std::abs(events[e].t_swap - 250.0 * static_cast<double>(e + 1)) < 2.0);
    }
}

TEST_CASE("classify_trajectory on synthetic zeta series") {
    auto deg = [](double d) { return d * kPi / 180.0; };

    SUBCASE("tadpole around L4") {
        std::vector<double> z;
        for (int k = 0; k < 200; ++k) z.push_back(deg(60.0) + deg(25.0) * std::sin(0.1 * k));
        CHECK(classify_trajectory(series_from_zeta(z)) == Regime::tadpole_L4);
    }

    SUBCASE("tadpole around L5") {
        std::vector<double> z;
        for (int k = 0; k < 200; ++k) z.push_back(deg(300.0) + deg(25.0) * std::sin(0.1 * k));
        CHECK(classify_trajectory(series_from_zeta(z)) == Regime::tadpole_L5);
    }

    SUBCASE("horseshoe sweeping 30..330 degrees") {
        std::vector<double> z;
        for (int k = 0; k < 300; ++k) z.push_back(deg(180.0) + deg(150.0) * std::sin(0.05 * k));
        CHECK(classify_trajectory(series_from_zeta(z)) == Regime::horseshoe);
    }

    SUBCASE("circulating when the unwrapped angle laps a full turn") {
        std::vector<double> z;
        for (int k = 0; k <= 70; ++k) z.push_back(0.1 * k);
        CHECK(classify_trajectory(series_from_zeta(z)) == Regime::circulating);
    }

    SUBCASE("undetermined: too short, no reversal, or ambiguous band") {
        std::vector<double> tiny;
        for (int k = 0; k < 15; ++k) tiny.push_back(1.0 * k);  // range > 2 pi but n < 16
        CHECK(classify_trajectory(series_from_zeta(tiny)) == Regime::undetermined);

        std::vector<double> drift;
        for (int k = 0; k < 100; ++k) drift.push_back(0.01 * k);  // monotone, < 1 turn
        CHECK(classify_trajectory(series_from_zeta(drift)) == Regime::undetermined);

        std::vector<double> half;  // only half a libration: one reversal
        for (int k = 0; k < 100; ++k)
            half.push_back(deg(60.0) + deg(25.0) * std::sin(kPi * k / 99.0));
        CHECK(classify_trajectory(series_from_zeta(half)) == Regime::undetermined);

        std::vector<double> mid;  // oscillates across 180 without horseshoe reach
        for (int k = 0; k < 200; ++k) mid.push_back(deg(170.0) + deg(30.0) * std::sin(0.1 * k));
        CHECK(classify_trajectory(series_from_zeta(mid)) == Regime::undetermined);
    }
}

TEST_CASE("rotating_frame: identity, co-rotation, and round trip") {
    TrajectoryRecord traj;
    for (int k = 0; k < 9; ++k) {
        const double t = 0.7 * k;
        SystemState s = three_body_sample(t, Vec2(std::cos(t), std::sin(t)),
                                          Vec2(-std::sin(t), std::cos(t)),
                                          Vec2(-std::sin(t), std::cos(t)) * 0.5,
                                          Vec2(-std::cos(t), -std::sin(t)) * 0.5);
        s.t = t;
        traj.samples.push_back(s);
    }
    traj.conservation.energy_rel_drift = 0.123;

    SUBCASE("omega = 0 is the identity") {
        const TrajectoryRecord same = rotating_frame(traj, 0.0);
        for (std::size_t k = 0; k < traj.samples.size(); ++k) {
            for (int b = 0; b < 3; ++b) {
                CHECK(same.samples[k].bodies[b].position ==
                      traj.samples[k].bodies[b].position);
                CHECK(same.samples[k].bodies[b].velocity ==
                      traj.samples[k].bodies[b].velocity);
            }
        }
    }

    SUBCASE("a circular orbit freezes in its co-rotating frame") {
        const TrajectoryRecord rot = rotating_frame(traj, 1.0);
        for (const SystemState& s : rot.samples) {
            CHECK((s.moon1().position - Vec2(1.0, 0.0)).norm() < 1e-12);
            CHECK(s.moon1().velocity.norm() < 1e-12);
        }
        CHECK(rot.conservation.energy_rel_drift == 0.123);
    }

    SUBCASE("transforming by omega then -omega restores the record") {
        const TrajectoryRecord back = rotating_frame(rotating_frame(traj, 0.8), -0.8);
        for (std::size_t k = 0; k < traj.samples.size(); ++k) {
            for (int b = 0; b < 3; ++b) {
                CHECK((back.samples[k].bodies[b].position -
                       traj.samples[k].bodies[b].position).norm() < 1e-12);
                CHECK((back.samples[k].bodies[b].velocity -
                       traj.samples[k].bodies[b].velocity).norm() < 1e-12);
            }
        }
    }
}

TEST_CASE("naff_frequency: pure tone to ~1e-10, constants, and two-tone dominance") {
    SUBCASE("single tone with phase") {
        const double w0 = 0.3, dt = 0.1;
        std::vector<double> s;
        for (int k = 0; k < 4096; ++k) s.push_back(2.5 * std::cos(w0 * dt * k + 0.4));
        const Tone tone = naff_frequency(s, dt);
        CHECK(std::abs(tone.frequency - w0) / w0 < 1e-8);
        CHECK(tone.amplitude == doctest::Approx(2.5).epsilon(1e-6));
    }

    SUBCASE("constant series reports zero frequency and the mean") {
        std::vector<double> s(200, 7.25);
        const Tone tone = naff_frequency(s, 0.5);
        CHECK(tone.frequency == 0.0);
        CHECK(tone.amplitude == doctest::Approx(7.25));
    }

    SUBCASE("mean offset does not leak into the frequency") {
        const double w0 = 0.3, dt = 0.1;
        std::vector<double> s;
        for (int k = 0; k < 2048; ++k) s.push_back(100.0 + std::cos(w0 * dt * k));
        const Tone tone = naff_frequency(s, dt);
        CHECK(std::abs(tone.frequency - w0) / w0 < 1e-5);
    }

    SUBCASE("dominant tone of a two-tone mix") {
        const double dt = 0.1;
        std::vector<double> s;
        for (int k = 0; k < 4096; ++k)
            s.push_back(1.0 * std::cos(0.3 * dt * k) + 0.2 * std::cos(0.7 * dt * k + 1.1));
        const Tone tone = naff_frequency(s, dt);
        CHECK(std::abs(tone.frequency - 0.3) < 1e-4);
        CHECK(tone.amplitude == doctest::Approx(1.0).epsilon(1e-2));
    }

    SUBCASE("recovery improves with record length") {
        const double w0 = 0.23, dt = 0.37;
        auto err = [&](int n) {
            std::vector<double> s;
            for (int k = 0; k < n; ++k) s.push_back(std::cos(w0 * dt * k + 0.9));
            return std::abs(naff_frequency(s, dt).frequency - w0) / w0;
        };
        const double e256 = err(256);
        const double e4096 = err(4096);
        CHECK(e4096 < e256);
        CHECK(e4096 < 1e-8);
    }

    SUBCASE("argument validation") {
        std::vector<double> s(63, 1.0);
        CHECK_THROWS_AS(naff_frequency(s, 0.1), invalid_input);
        std::vector<double> ok(64, 1.0);
        CHECK_THROWS_AS(naff_frequency(ok, 0.0), invalid_input);
        CHECK_THROWS_AS(naff_frequency(ok, -0.1), invalid_input);
    }
}

TEST_CASE("quasiperiodicity_index: steady tone vs drifting tone") {
    const double nu = 2.0 * kPi / 73.3;
    const std::size_t n = 2048;

    SUBCASE("steady libration scores ~1e-10") {
        std::vector<double> z;
        for (std::size_t k = 0; k < n; ++k)
            z.push_back(1.0 + 0.3 * std::sin(nu * static_cast<double>(k)));
        CHECK(quasiperiodicity_index(series_from_zeta(z)) < 1e-8);
    }

    SUBCASE("a 1 percent frequency drift is clearly visible") {
        std::vector<double> z;
        const double total = static_cast<double>(n - 1);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = static_cast<double>(k);
            z.push_back(1.0 + 0.3 * std::sin(nu * t * (1.0 + 0.005 * t / total)));
        }
        const double qp = quasiperiodicity_index(series_from_zeta(z));
        CHECK(qp > 1e-3);
        CHECK(qp < 0.05);
    }

    SUBCASE("too short or unresolved series throw") {
        std::vector<double> z;
        for (std::size_t k = 0; k < 100; ++k) z.push_back(std::sin(0.3 * k));
        CHECK_THROWS_AS(quasiperiodicity_index(series_from_zeta(z)), invalid_input);

        std::vector<double> flat(256, 2.0);
        CHECK_THROWS_AS(quasiperiodicity_index(series_from_zeta(flat)), numerical_error);

        std::vector<double> slow;  // half a cycle per half-series
        for (std::size_t k = 0; k < 256; ++k)
            slow.push_back(std::sin(2.0 * kPi * static_cast<double>(k) / 400.0));
        CHECK_THROWS_AS(quasiperiodicity_index(series_from_zeta(slow)), numerical_error);
    }
}

TEST_CASE("resonant_series of a propagated L4 configuration stays at 60 degrees") {
    // Saturn-like mass ratios at the triangular equilibrium: the full three-
    // body propagation should hold zeta at 60 degrees to high accuracy, and
    // the osculating axes of the two moons should stay equal.
    const std::array<double, 3> masses = {1.0, 1.2660e-1 / 3.7931187e7,
                                          3.5130e-2 / 3.7931187e7};
    const EquilibriumConfig cfg =
        lagrange_equilateral(masses, 1.0, EquilibriumKind::lagrange_L4);
    const SystemState state = equilibrium_state(cfg);

    const double period = 2.0 * kPi / cfg.angular_rate;
    IntegratorConfig icfg;
    icfg.scheme = Scheme::yoshida4;
    icfg.step = period / 2000.0;
    icfg.output_stride = 20;
    const TrajectoryRecord traj = propagate(state, icfg, 10.0 * period);
    REQUIRE(traj.stop == StopReason::completed);

    const ResonantSeries series = resonant_series(traj);
    REQUIRE(series.t.size() > 500);
    double worst_zeta = 0.0;
    double worst_da = 0.0;
    for (std::size_t k = 0; k < series.t.size(); ++k) {
        worst_zeta = std::max(worst_zeta, std::abs(series.zeta[k] - kPi / 3.0));
        worst_da = std::max(worst_da, std::abs(series.delta_a[k]));
    }
    CHECK(worst_zeta < 1e-7);
    CHECK(worst_da < 1e-7);
}
