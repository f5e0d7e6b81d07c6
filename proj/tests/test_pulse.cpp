#include "fhn/pulse.hpp"
#include "oracle_values.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

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

}  // namespace

TEST_CASE("pulse at eps = 0.01 matches the collocation reference", "[pulse]") {
    const PulseSolution& s = demo_pulse();
    CHECK(s.final_residual < 1e-10);
    CHECK_THAT(s.speed, WithinAbs(oracle::c_eps001, 1e-8));
    CHECK_THAT(s.z_ae, WithinAbs(oracle::z_ae_eps001, 1e-5));
    CHECK_THAT(s.state_at(0.0)[0], WithinAbs(0.5, 1e-12));
}

TEST_CASE("pulse is homoclinic to the origin", "[pulse]") {
    const PulseSolution& s = demo_pulse();
    CHECK(s.states.front().norm() < 1e-6);
    CHECK(std::abs(s.states.back()[0]) < 1e-6);
    CHECK(std::abs(s.states.back()[1]) < 1e-6);
    // w still decays on the slow scale at the cut
    CHECK(s.states.back()[2] > 0.0);
    CHECK(s.states.back()[2] < 0.5 * solve_wb(s.params).wb);
}

TEST_CASE("dense output follows the vector field", "[pulse]") {
    const PulseSolution& s = demo_pulse();
    for (double xi : {-3.3, 0.45, 7.7, 12.1, 20.9}) {
        const double h = 1e-5;
        const Vec3 fd = (s.state_at(xi + h) - s.state_at(xi - h)) / (2 * h);
        CHECK((fd - s.deriv_at(xi)).norm() < 1e-6);
    }
}

TEST_CASE("backward shooting and shorter segments agree", "[pulse]") {
    ModelParams p;
    ShootOptions o;
    o.direction = ShootDirection::backward;
    const PulseSolution b = shoot_pulse(p, wave_speed_c0(p), o);
    CHECK_THAT(b.speed, WithinAbs(demo_pulse().speed, 1e-9));
    ShootOptions h;
    h.segment = 0.5;
    const PulseSolution q = shoot_pulse(p, wave_speed_c0(p), h);
    CHECK_THAT(q.speed, WithinAbs(demo_pulse().speed, 1e-9));
}

TEST_CASE("continuation from a neighbouring eps", "[pulse]") {
    ModelParams p;
    p.eps = 0.02;
    const PulseSolution s = shoot_pulse_from(p, demo_pulse());
    CHECK_THAT(s.speed, WithinAbs(oracle::c_eps002, 1e-8));
}

TEST_CASE("front stays close to the layer orbit", "[pulse]") {
    const PulseSolution& s = demo_pulse();
    const double eps = s.params.eps;
    const double d = front_deviation(s);
    CHECK(d > 0.0);
    CHECK(d < 20 * eps * std::abs(std::log(eps)));
    CHECK(slow_deviation(s) < 0.2);
    const SegmentMarkers& m = s.markers;
    CHECK(m.f_first <= m.f_last);
    CHECK(m.r_first <= m.r_last);
}

TEST_CASE("pulse exports", "[pulse]") {
    const auto dir = std::filesystem::temp_directory_path() / "fhn_pulse_test";
    std::filesystem::create_directories(dir);
    write_pulse_csv(demo_pulse(), (dir / "p.csv").string());
    write_pulse_json(demo_pulse(), (dir / "p.json").string());
    std::ifstream f(dir / "p.csv");
    std::string header;
    std::getline(f, header);
    CHECK(header.rfind("xi,u,v,w", 0) == 0);
    CHECK(std::filesystem::file_size(dir / "p.json") > 100);
}
