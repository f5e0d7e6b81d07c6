#include "fhn/model.hpp"
#include "oracle_values.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace fhn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("deformation at w = 0 and at the domain edge", "[model]") {
    ModelParams p;
    REQUIRE(deformation_F(p, 0.0) == F0(p));
    REQUIRE(F0(p) == 2.0);
    REQUIRE(Fm(p) == 1.0);
    // sqrt argument vanishes at the limit, F drops to F0/2
    REQUIRE_THAT(deformation_F(p, w_limit(p) * (1 - 1e-15)), WithinAbs(Fm(p), 1e-6));
    REQUIRE_THROWS_AS(deformation(p, w_limit(p) + 1e-9), DomainError);
}

TEST_CASE("F derivatives match central differences", "[model]") {
    ModelParams p;
    for (double w : {0.0, 0.1, 0.27, 0.9}) {
        const double h = 1e-5;
        const double fd1 = (deformation_F(p, w + h) - deformation_F(p, w - h)) / (2 * h);
        const double fd2 = (deformation(p, w + h).Fw - deformation(p, w - h).Fw) / (2 * h);
        CHECK_THAT(deformation(p, w).Fw, WithinRel(fd1, 1e-8));
        CHECK_THAT(deformation(p, w).Fww, WithinRel(fd2, 1e-7));
    }
}

TEST_CASE("c0 at the demo parameters is exactly 1/4", "[model]") {
    ModelParams p;
    REQUIRE(wave_speed_c0(p) == oracle::c0_star);
}

TEST_CASE("back level and back speed identity", "[model]") {
    ModelParams p;
    const WbResult r = solve_wb(p);
    REQUIRE_THAT(r.wb, WithinAbs(oracle::wb_star, 1e-12));
    REQUIRE(r.sign_changes == 1);
    const Branches b = critical_branches(p, r.wb);
    REQUIRE(b.U1 < b.U2);
    REQUIRE_THAT(b.U2, WithinAbs(oracle::U2_wb_star, 1e-12));
    const double c_back = std::sqrt(2 * p.k) * (2 * b.U1 - b.U2) / (2 * deformation_F(p, r.wb));
    REQUIRE_THAT(c_back, WithinAbs(wave_speed_c0(p), 1e-11));

    p.a = 0.4;
    REQUIRE_THAT(solve_wb(p).wb, WithinAbs(oracle::wb_a04, 1e-12));
}

TEST_CASE("no back level below the existence threshold", "[model]") {
    ModelParams p;
    p.a = 0.1;
    REQUIRE_THROWS_AS(solve_wb(p), ValidityError);
}

TEST_CASE("layer heteroclinics solve the layer system", "[model]") {
    ModelParams p;
    const auto [front, back] = front_back_profiles(p);
    CHECK(layer_residual(p, front) < 1e-10);
    CHECK(layer_residual(p, back) < 1e-10);
    CHECK_THAT(front.u(0.0), WithinAbs(0.5, 1e-15));
    CHECK_THAT(back.u(0.0), WithinAbs(0.5 * back.amplitude, 1e-15));
    // tails of the derivative stay accurate far out
    const double x = -40.0;
    const double ref = -back.rate * back.amplitude * std::exp(back.rate * x);
    CHECK_THAT(back.du(x), WithinRel(ref, 1e-10));
}

TEST_CASE("Jacobian matches finite differences", "[model]") {
    ModelParams p;
    const Vec3 s(0.4, -0.1, 0.2);
    const double c = 0.23;
    const Eigen::Matrix3d J = field_jacobian(p, c, s);
    for (int j = 0; j < 3; ++j) {
        Vec3 e = Vec3::Zero();
        e[j] = 1e-6;
        const Vec3 fd = (vector_field(p, c, s + e) - vector_field(p, c, s - e)) / 2e-6;
        for (int i = 0; i < 3; ++i) CHECK_THAT(J(i, j), WithinAbs(fd[i], 1e-8));
    }
    const Vec3 fdc = (vector_field(p, c + 1e-6, s) - vector_field(p, c - 1e-6, s)) / 2e-6;
    CHECK((field_dc(p, c, s) - fdc).norm() < 1e-7);
}

TEST_CASE("parameter guards", "[model]") {
    ModelParams p;
    p.a = 0.6;
    REQUIRE_THROWS_AS(validate(p), ValidityError);
    p = {};
    p.eps = 0.0;
    REQUIRE_NOTHROW(validate(p));
    REQUIRE_THROWS_AS(validate(p, true), ValidityError);
    // a = 0 with gamma = 1: (1/2, 1/2) is a second rest state
    p = {};
    p.a = 0.0;
    CHECK(reaction(p, 0.5, 0.5).f == 0.0);
    REQUIRE_THROWS_AS(validate(p, true), ValidityError);
    p.gamma = 0.4;
    REQUIRE_NOTHROW(validate(p, true));
}
