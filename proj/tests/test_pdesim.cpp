#include "fhn/pdesim.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace fhn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const PulseSolution& pulse02() {
    static const PulseSolution s = [] {
        ModelParams p;
        p.eps = 0.02;
        return shoot_pulse(p, wave_speed_c0(p));
    }();
    return s;
}

PdeOptions short_run(int n, double t) {
    PdeOptions o;
    o.n = n;
    o.t_end = t;
    o.record_every = 0.5;
    o.tail_tol = 1e-2;
    o.left_margin = 10;
    return o;
}

}  // namespace

TEST_CASE("rest state is an equilibrium of the discretization", "[pdesim]") {
    ModelParams p;
    PdeState s = rest_state(-20, 0.1, 401);
    std::vector<double> dU, dW;
    spatial_operator(p, s, dU, dW);
    for (std::size_t i = 0; i < s.size(); ++i) REQUIRE((dU[i] == 0.0 && dW[i] == 0.0));
    PulseProfile prof(pulse02());
    PdeOptions o = short_run(401, 5.0);
    const PdeRun r = evolve(pulse02().params, s, prof, 0.0, o);
    for (std::size_t i = 0; i < s.size(); ++i)
        REQUIRE((std::abs(r.final_state.U[i]) < 1e-12 && std::abs(r.final_state.W[i]) < 1e-12));
}

TEST_CASE("operator reduces to the standard Laplacian when F is flat", "[pdesim]") {
    ModelParams p;
    p.M = 1e-12;
    p.c1 = 1e12;
    PdeState s = rest_state(-10, 0.05, 401);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s.U[i] = 0.8 * std::exp(-s.x(i) * s.x(i));
        s.W[i] = 0.1 * std::exp(-0.5 * s.x(i) * s.x(i));
    }
    std::vector<double> dU, dW;
    spatial_operator(p, s, dU, dW);
    const double h2 = s.h * s.h;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const double u = s.U[i];
        const double lap = (s.U[i + 1] - 2 * u + s.U[i - 1]) / h2;
        const double ref = lap + p.k * u * (u - p.a) * (1 - u) - u * s.W[i];
        REQUIRE_THAT(dU[i], WithinAbs(ref, 1e-9));
        // symmetric data gives symmetric rates
        REQUIRE_THAT(dU[i], WithinAbs(dU[s.size() - 1 - i], 1e-8));
    }
}

TEST_CASE("orbital distance", "[pdesim]") {
    PulseProfile prof(pulse02());
    PdeOptions o = short_run(800, 10.0);
    double off = 0.0;
    const PdeState s = pulse_initial_state(prof, o, &off);
    CHECK(orbital_distance(s, prof, off).distance == 0.0);
    // same profile three cells to the right
    PdeState t = s;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const Vec3 v = prof(t.x(i) + off - 3 * t.h);
        t.U[i] = v[0];
        t.W[i] = v[2];
    }
    const DistanceResult d = orbital_distance(t, prof, off);
    CHECK(d.distance < 1e-10);
    CHECK_THAT(d.shift, WithinAbs(off - 3 * t.h, 1e-9));
    PdeState b = s;
    add_bump(b, 0.5 * pulse02().z_ae - off, 0.01, 2.0);
    const double db = orbital_distance(b, prof, off).distance;
    CHECK(db > 0.008);
    CHECK(db <= 0.01 + 1e-12);
}

TEST_CASE("simulated pulse travels at the ODE speed with second-order grid error", "[pdesim]") {
    const PulseSolution& pl = pulse02();
    PulseProfile prof(pl);
    double c[3];
    const int ns[3] = {400, 800, 1600};
    for (int i = 0; i < 3; ++i) {
        const PdeOptions o = short_run(ns[i], 12.0);
        double off = 0.0;
        const PdeState s = pulse_initial_state(prof, o, &off);
        const PdeRun r = evolve(pl.params, s, prof, off, o);
        c[i] = r.measured_speed();
        CHECK_THAT(c[i], WithinRel(pl.speed, 0.02));
        CHECK(r.distances.back() < 5e-3);
    }
    const double order = std::log2((c[0] - c[1]) / (c[1] - c[2]));
    CHECK(order >= 1.8);
}

TEST_CASE("semi-implicit scheme agrees with RK4", "[pdesim]") {
    const PulseSolution& pl = pulse02();
    PulseProfile prof(pl);
    PdeOptions o = short_run(800, 6.0);
    double off = 0.0;
    const PdeState s = pulse_initial_state(prof, o, &off);
    const PdeRun a = evolve(pl.params, s, prof, off, o);
    o.scheme = TimeScheme::imex;
    o.dt = 0.01;
    const PdeRun b = evolve(pl.params, s, prof, off, o);
    CHECK_THAT(b.measured_speed(), WithinRel(a.measured_speed(), 0.01));
    CHECK(b.distances.back() < 1e-2);
}

TEST_CASE("failure detection", "[pdesim]") {
    ModelParams p;
    PulseProfile prof(pulse02());
    PdeOptions o = short_run(101, 1.0);
    PdeState s = rest_state(-5, 0.1, 101);
    s.U[50] = 11.0;
    CHECK_THROWS_AS(evolve(p, s, prof, 0.0, o), BlowUpError);
    s = rest_state(-5, 0.1, 101);
    s.W[10] = w_limit(p) + 1.0;
    CHECK_THROWS_AS(evolve(p, s, prof, 0.0, o), DomainError);
    s = rest_state(-5, 0.1, 101);
    o.dt = 1.0;
    CHECK_THROWS_AS(evolve(p, s, prof, 0.0, o), ValidityError);
}
