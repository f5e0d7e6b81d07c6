#pragma once

#include "fhn/model.hpp"
#include "fhn/ode.hpp"

#include <string>
#include <vector>

namespace fhn {

/// Four-piece singular orbit: front at w = 0, right slow arc, back at w = w_b, L0 arc.
struct SingularSkeleton {
    Vec3 front_start;  // (0,0,0)
    Vec3 front_end;    // (1,0,0)
    Vec3 back_start;   // (U2(w_b),0,w_b)
    Vec3 back_end;     // (0,0,w_b)
    double wb;
    double c0;
    /// Points along the right slow arc U2(w), w in [0, w_b].
    std::vector<Vec3> right_arc;
    /// Points along the L0 arc u = 0, w from w_b down to 0.
    std::vector<Vec3> left_arc;
};

SingularSkeleton singular_skeleton(const ModelParams& p, int samples = 64);

/// Eigen-structure of the fast system linearized at the origin.
struct OriginSpectrum {
    double mu_u;   // unstable
    double mu_s;   // fast stable
    double mu_1;   // slow stable, -eps*gamma/c
    Vec3 left_u;   // left eigenvectors
    Vec3 left_s;
    Vec3 left_1;
    Vec3 right_u;
};

OriginSpectrum origin_spectrum(const ModelParams& p, double c);

enum class ShootDirection { forward, backward };

struct ShootOptions {
    double tol = 1e-10;      // max-norm of the matching residual
    double rtol = 1e-12;     // integrator tolerances
    double atol = 1e-12;
    double segment = 1.0;    // shooting segment length
    int max_iter = 40;
    double left_length = 0;  // 0: automatic
    double right_length = 0; // 0: automatic
    ShootDirection direction = ShootDirection::forward;
    double tau = 0;          // 0: default from the layer rates
    double sigma0 = 0.1;     // slow-manifold proximity used for xi0
};

struct SegmentMarkers {
    double Xi;    // -tau log eps
    double xi0;
    // Index ranges [first, last] on the pulse grid (last < first when empty).
    int f_first, f_last;
    int r_first, r_last;
    int b_first, b_last;
    int l_first, l_last;
    bool clipped;
};

struct PulseSolution {
    ModelParams params;
    double speed = 0;
    double z_ae = 0;
    double xi_left = 0;   // grid starts at -xi_left
    double xi_cut = 0;    // grid ends at +xi_cut
    double tau = 0;
    std::vector<double> grid;
    std::vector<Vec3> states;
    std::vector<Vec3> derivs;   // vector field at each sample
    std::vector<Vec3> second;   // J * field, for Hermite interpolation
    std::vector<double> nodes;  // shooting nodes
    std::vector<Vec3> node_states;
    std::vector<double> residual_history;
    int iterations = 0;
    double final_residual = 0;
    SegmentMarkers markers{};

    Vec3 state_at(double xi) const;
    Vec3 deriv_at(double xi) const;
    /// Index of the node at xi (exact match required).
    int node_index(double xi) const;
};

PulseSolution shoot_pulse(const ModelParams& p, double c_guess, const ShootOptions& opt = {});
/// Reuses a converged pulse as initial data for new parameters (c and node states).
PulseSolution shoot_pulse_from(const ModelParams& p, const PulseSolution& guess,
                               const ShootOptions& opt = {});

double default_tau(const ModelParams& p);
SegmentMarkers segment_markers(const PulseSolution& pulse, double tau, double sigma0 = 0.1);

struct DerivativeSample {
    double xi;
    Vec3 d;
};
std::vector<DerivativeSample> derivative_profile(const PulseSolution& pulse);

/// sup over J_f of |(u,w) - (u_f,0)|.
double front_deviation(const PulseSolution& pulse);
/// max over J_r of |u - U2(w)| + |v|.
double slow_deviation(const PulseSolution& pulse);

void write_pulse_csv(const PulseSolution& pulse, const std::string& path);
void write_pulse_json(const PulseSolution& pulse, const std::string& path);

}  // namespace fhn
