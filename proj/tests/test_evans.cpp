#include "fhn/evans.hpp"
#include "oracle_values.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace fhn;
using Catch::Matchers::WithinAbs;

namespace {

const PulseSolution& demo_pulse() {
    static const PulseSolution s = [] {
        ModelParams p;
        return shoot_pulse(p, wave_speed_c0(p));
    }();
    return s;
}

// Coordinates of y ^ z in the basis (e1^e2, e1^e3, e2^e3).
CVec3 wedge(const CVec3& y, const CVec3& z) {
    return {y[0] * z[1] - y[1] * z[0], y[0] * z[2] - y[2] * z[0], y[1] * z[2] - y[2] * z[1]};
}

}  // namespace

TEST_CASE("second compound acts as a derivation on wedges", "[evans]") {
    std::mt19937 rng(7);
    std::normal_distribution<double> n;
    for (int t = 0; t < 5; ++t) {
        CMat3 A;
        CVec3 y, z;
        for (int i = 0; i < 3; ++i) {
            y[i] = cplx(n(rng), n(rng));
            z[i] = cplx(n(rng), n(rng));
            for (int j = 0; j < 3; ++j) A(i, j) = cplx(n(rng), n(rng));
        }
        const CVec3 lhs = second_compound(A) * wedge(y, z);
        const CVec3 rhs = wedge(A * y, z) + wedge(y, A * z);
        CHECK((lhs - rhs).norm() < 1e-12);
    }
}

TEST_CASE("Evans function is real on the real axis and conjugate symmetric", "[evans]") {
    const PulseSolution& s = demo_pulse();
    const SpectralConfig cfg = default_spectral_config(s.params, s.speed);
    CHECK(std::abs(evans_function(s, cfg, 0.3).value.imag()) < 1e-12);
    const cplx l(0.1, 0.15);
    const cplx a = evans_function(s, cfg, l).value, b = evans_function(s, cfg, std::conj(l)).value;
    CHECK(std::abs(a - std::conj(b)) < 1e-10 * std::abs(a));
}

TEST_CASE("Evans value does not depend on the matching point", "[evans]") {
    const PulseSolution& s = demo_pulse();
    SpectralConfig cfg = default_spectral_config(s.params, s.speed);
    const cplx l(0.3, 0.2);
    const cplx ref = evans_function(s, cfg, l).value;
    for (double xm : {-5.0, 5.0}) {
        cfg.xi_match = xm;
        CHECK(std::abs(evans_function(s, cfg, l).value - ref) < 1e-8 * std::abs(ref));
    }
}

TEST_CASE("Evans function refuses lambda without a dominant unstable direction", "[evans]") {
    const PulseSolution& s = demo_pulse();
    const SpectralConfig cfg = default_spectral_config(s.params, s.speed);
    CHECK_FALSE(evans_admissible(s.params, s.speed, -2.0));
    CHECK_THROWS_AS(evans_function(s, cfg, -2.0), DomainError);
}

TEST_CASE("argument principle on a known polynomial", "[evans]") {
    const cplx r1(0.1, 0.0), r2(-0.3, 0.0), r3(0.0, 0.2);
    ScalarEvans E = [&](cplx z) { return (z - r1) * (z - r2) * (z - r3) * std::exp(z); };
    const ContourReport rep = count_zeros_fn(E, 1, Contour::circle(0.0, 0.5), 32, "poly", true);
    REQUIRE(rep.winding == 3);
    REQUIRE(rep.zeros.size() == 3);
    for (cplx r : {r1, r2, r3}) {
        double best = 1e300;
        for (const auto& z : rep.zeros) best = std::min(best, std::abs(z.lambda - r));
        CHECK(best < 1e-12);
    }
    // a double root is reported with order 2
    ScalarEvans D = [](cplx z) { return (z - 0.1) * (z - 0.1); };
    const ContourReport d = count_zeros_fn(D, 1, Contour::circle(0.0, 0.5), 32, "double", true);
    CHECK(d.winding == 2);
}

TEST_CASE("contour geometry", "[evans]") {
    SpectralConfig cfg;
    const Contour r2 = region_R2(cfg);
    CHECK(r2.inside(cplx(1.0, 1.0)));
    CHECK_FALSE(r2.inside(0.0));
    CHECK_FALSE(r2.inside(cplx(-cfg.delta, 0.5)));
    CHECK(region_R1(cfg).inside(0.0));
}

TEST_CASE("two eigenvalues in R1 at eps = 0.01", "[evans]") {
    const PulseSolution& s = demo_pulse();
    const SpectralConfig cfg = default_spectral_config(s.params, s.speed);
    const ContourReport rep = count_zeros(s, cfg, region_R1(cfg), 64, "R1", true);
    REQUIRE(rep.winding == 2);
    REQUIRE(rep.zeros.size() == 2);
    CHECK(std::abs(rep.zeros[0].lambda) < 1e-8 * cfg.delta);
    CHECK_THAT(rep.zeros[1].lambda.real(), WithinAbs(oracle::lambda1_eps001, 1e-8));
    CHECK(std::abs(rep.zeros[1].lambda.imag()) < 1e-12);
    CHECK(local_order(s, cfg, 0.0, 0.02) == 1);
}

TEST_CASE("reduced layer problems", "[evans]") {
    ModelParams p;
    const SpectralConfig cfg = default_spectral_config(p, wave_speed_c0(p));
    for (LayerKind k : {LayerKind::front, LayerKind::back}) {
        const ReducedReport r = reduced_front_back_spectrum(p, cfg, k);
        CHECK(std::abs(r.lambda_top) < 1e-8);
        CHECK(r.sign_changes == 0);
        CHECK(r.r2_winding == 0);
    }
}
