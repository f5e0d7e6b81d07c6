#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>

namespace fhn {

using Vec3 = Eigen::Vector3d;

/// Raised when an evaluation leaves the admissible domain (e.g. sqrt argument of F).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when parameters fall outside the range where the construction applies.
class ValidityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModelParams {
    double a = 0.25;
    double k = 2.0;
    double gamma = 1.0;
    double M = 2.0;
    double c1 = 1.0;
    double eps = 0.01;
};

/// Throws ValidityError with a readable message. With require_eps the
/// singular parameter must be strictly positive.
void validate(const ModelParams& p, bool require_eps = false);

/// True when u = gamma*w meets the critical set only at the origin.
bool trivial_rest_state_only(const ModelParams& p);

struct Deformation {
    double F;
    double Fw;
    double Fww;
};

double sqrt_argument(const ModelParams& p, double w);
/// Largest admissible w (exclusive) for F.
double w_limit(const ModelParams& p);
Deformation deformation(const ModelParams& p, double w);
inline double deformation_F(const ModelParams& p, double w) { return deformation(p, w).F; }
double F0(const ModelParams& p);
double Fm(const ModelParams& p);

struct Reaction {
    double f;
    double fu;
    double fw;
};

Reaction reaction(const ModelParams& p, double u, double w);

enum class FieldMode { fast, layer, reduced };

/// State is (u, v, w) with v = u'/F.
Vec3 vector_field(const ModelParams& p, double c, const Vec3& s, FieldMode mode = FieldMode::fast);

/// d(vector_field)/d(state) for the fast system.
Eigen::Matrix3d field_jacobian(const ModelParams& p, double c, const Vec3& s);
/// d(vector_field)/dc for the fast system.
Vec3 field_dc(const ModelParams& p, double c, const Vec3& s);

struct Branches {
    double zero = 0.0;
    double U1;  // smaller root
    double U2;  // larger root
};

double fold_level(const ModelParams& p);
Branches critical_branches(const ModelParams& p, double w0);

double wave_speed_c0(const ModelParams& p);

struct WbResult {
    double wb;
    double residual;
    int sign_changes;  // on the 1e3-point scan of the bracket
    double bracket_hi;
};

/// Back-layer level: (1-2a)F(w) = (2U1(w) - U2(w))F(0).
double wb_residual(const ModelParams& p, double w);
WbResult solve_wb(const ModelParams& p);

enum class LayerKind { front, back };

/// Closed-form logistic heteroclinic of the layer system.
struct LayerOrbit {
    LayerKind kind;
    double w_level;
    double speed;
    double C;          // integration constant
    double amplitude;  // 1 for the front, U2(w_b) for the back
    double rate;       // exponent of the logistic
    double F;          // F(w_level)
    std::pair<Vec3, Vec3> endpoints;

    double u(double xi) const;
    double du(double xi) const;
    double ddu(double xi) const;
    double v(double xi) const { return du(xi) / F; }
    Vec3 state(double xi) const { return {u(xi), v(xi), w_level}; }
};

std::pair<LayerOrbit, LayerOrbit> front_back_profiles(const ModelParams& p);

/// Max-norm residual of the layer system along the orbit over [lo, hi].
double layer_residual(const ModelParams& p, const LayerOrbit& orbit, double lo = -20.0,
                      double hi = 20.0, int n = 4001);

}  // namespace fhn
