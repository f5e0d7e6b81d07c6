#include "fhn/essential.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace fhn;
using Catch::Matchers::WithinAbs;

namespace {
std::vector<double> grid(double lo, double hi, int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(lo + (hi - lo) * i / (n - 1));
    return g;
}
}  // namespace

TEST_CASE("essential curves lie left of max(-eps gamma, -ka)", "[essential]") {
    ModelParams p;
    const double c = 0.23;
    const auto pts = essential_curves(p, c, grid(-10, 10, 2001));
    const double bound = std::max(-p.eps * p.gamma, -p.k * p.a);
    for (const auto& q : pts) REQUIRE(q.lambda.real() <= bound + 1e-12);
}

TEST_CASE("curve tips at l = 0", "[essential]") {
    ModelParams p;
    const auto pts = essential_curves(p, 0.23, {0.0});
    for (const auto& q : pts) {
        if (q.branch == EssentialBranch::line) CHECK(q.lambda == cplx(-p.eps * p.gamma, 0.0));
        else CHECK(q.lambda == cplx(-p.k * p.a, 0.0));
    }
    p.a = 0.0;
    for (const auto& q : essential_curves(p, 0.23, {0.0}))
        if (q.branch == EssentialBranch::parabola) CHECK(std::abs(q.lambda) == 0.0);
}

TEST_CASE("spatial eigenvalues agree with a numerical eigensolve", "[essential]") {
    ModelParams p;
    const double c = 0.23;
    for (cplx lam : {cplx(0.3, 0.0), cplx(-0.005, 2.0), cplx(1.5, -4.0)}) {
        const auto A = asymptotic_matrix(p, c, lam).entries;
        Eigen::ComplexEigenSolver<CMat3> es(A);
        const SpatialEigenvalues s = spatial_eigenvalues(p, c, lam);
        for (cplx m : {s.mu1, s.mu_plus, s.mu_minus}) {
            double best = 1e300;
            for (int i = 0; i < 3; ++i) best = std::min(best, std::abs(es.eigenvalues()[i] - m));
            CHECK(best < 1e-10);
        }
    }
}

TEST_CASE("Morse index is one right of the essential spectrum", "[essential]") {
    ModelParams p;
    const double c = 0.23;
    int tested = 0;
    for (double x : grid(-0.009, 3.0, 10))
        for (double y : grid(-3.0, 3.0, 10)) {
            const cplx lam(x, y);
            REQUIRE(right_of_essential(p, lam));
            CHECK(morse_index(p, c, lam) == 1);
            ++tested;
        }
    CHECK(tested == 100);
    CHECK_THROWS_AS(morse_index(p, c, cplx(-p.eps * p.gamma, 0.0)), DomainError);
}
