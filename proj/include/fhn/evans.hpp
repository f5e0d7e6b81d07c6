#pragma once

#include "fhn/essential.hpp"
#include "fhn/pulse.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fhn {

/// Raised when the argument principle cannot be resolved on a contour.
class ContourError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SpectralConfig {
    double k1 = 0.25;
    double eta = 0.125;
    double delta = 0.2;
    double M_tilde = 30.0;
    double nu = 1.0;           // used for L_eps = -nu log eps
    double nu_required = 0.0;  // max of all lower bounds, including 2/mu_gap
    double mu_gap = 0.0;
    bool trace_normalize = true;
    bool shifted = false;
    double xi_match = 0.0;
    double right_cut = 0.0;  // 0: whole pulse grid
    double rtol = 1e-10;
    double atol = 1e-11;
    int jobs = 1;
};

/// Defaults derived from the model; nu and mu_gap need the pulse speed.
SpectralConfig default_spectral_config(const ModelParams& p, double c);

/// A0(xi, lambda) evaluated at an explicit state on the orbit.
CMat3 linearization_at(const ModelParams& p, double c, const Vec3& X, cplx lambda);
CMat3 linearization_matrix(const PulseSolution& pulse, double xi, cplx lambda);
CMat3 shifted_matrix(const PulseSolution& pulse, const SpectralConfig& cfg, double xi, cplx lambda);
/// Second compound in the basis (e1^e2, e1^e3, e2^e3).
CMat3 second_compound(const CMat3& A);

struct EvansValue {
    cplx lambda;
    cplx value;
    double log_scale = 0.0;
    double conditioning = 0.0;
    bool ill_conditioned = false;
};

/// True when the unstable spatial eigenvalue strictly dominates the other two,
/// the condition under which the Evans function below is analytic.
bool evans_admissible(const ModelParams& p, double c, cplx lambda, double margin = 1e-3);

EvansValue evans_function(const PulseSolution& pulse, const SpectralConfig& cfg, cplx lambda);
std::vector<EvansValue> evans_batch(const PulseSolution& pulse, const SpectralConfig& cfg,
                                    const std::vector<cplx>& lambdas);

/// Closed contour made of straight pieces and circular arcs, positively oriented.
class Contour {
public:
    struct Piece {
        bool arc;
        cplx a, b;         // line endpoints
        cplx center;
        double r, t0, t1;  // arc angles
        double length() const;
        cplx at(double s) const;  // s in [0, 1]
    };

    static Contour circle(cplx center, double r);
    static Contour rectangle(double x0, double x1, double y0, double y1);
    void move_to(cplx b);
    void line_to(cplx b);
    void arc(cplx center, double r, double t0, double t1);

    cplx point(double t) const;  // t in [0, 1)
    bool inside(cplx z) const;
    double scale() const;
    const std::vector<Piece>& pieces() const { return pieces_; }

private:
    std::vector<Piece> pieces_;
    cplx cursor_{};
};

struct ZeroInfo {
    cplx lambda;
    int order;
};

struct ContourReport {
    std::string region;
    std::vector<cplx> contour;
    std::vector<cplx> values;
    std::vector<double> log_scale;
    int winding = 0;
    std::vector<ZeroInfo> zeros;
    int evaluations = 0;
    double max_abs = 0.0;
    double min_abs = 0.0;
};

using ScalarEvans = std::function<cplx(cplx)>;

ContourReport count_zeros(const PulseSolution& pulse, const SpectralConfig& cfg,
                          const Contour& contour, int n_points, const std::string& region = "custom",
                          bool refine = true);
/// Same machinery for any analytic function (used for reduced problems).
ContourReport count_zeros_fn(const ScalarEvans& E, int jobs, const Contour& contour, int n_points,
                             const std::string& region, bool refine);

/// Secant polish of a zero of E starting near z0.
cplx refine_zero(const ScalarEvans& E, cplx z0, double scale);
int local_order(const PulseSolution& pulse, const SpectralConfig& cfg, cplx z, double r);

Contour region_R1(const SpectralConfig& cfg);
/// Box of half-width M~/sqrt(2) with Re >= -delta/2 and the delta-disk removed.
Contour region_R2(const SpectralConfig& cfg);
/// Largest angle <= 2pi/3 for which the Evans function stays analytic on |lambda| in [M~, 2M~].
double r3_angle(const ModelParams& p, double c, const SpectralConfig& cfg);
Contour region_R3(const ModelParams& p, double c, const SpectralConfig& cfg);
/// Region right of the essential spectrum for a = 0, kept delta/2 off the parabola.
Contour region_omega_plus(const ModelParams& p, double c, const SpectralConfig& cfg);

struct R3Report {
    int samples = 0;
    bool sqrt_half_plane = true;   // Re sqrt(lambda/|lambda|) > 1/2
    bool mu23_bound = true;        // |Re mu23| > 1/4 + M/(8 c1)
    int case1 = 0;
    int case2 = 0;
    bool case2_separation = true;  // center eigenvalue |Re| <= 1/8 in case 2
    double theta_admissible = 0.0;
    double arc_min_abs = 0.0;
    double arc_max_abs = 0.0;
    int arc_winding = 0;
    bool ok() const { return sqrt_half_plane && mu23_bound && case2_separation && arc_min_abs > 0.0; }
};

R3Report r3_exclusion_check(const PulseSolution& pulse, const SpectralConfig& cfg,
                            const std::vector<cplx>& lambda_samples);

struct ReducedReport {
    LayerKind kind;
    double lambda_top = 0.0;
    int sign_changes = 0;
    double essential_edge = 0.0;  // reduced spectrum lies left of this
    int real_zeros_in_scan = 0;
    std::vector<double> real_zeros;
    int r2_winding = 0;
};

/// Evans function of the 2x2 layer eigenvalue problem for front or back.
cplx reduced_evans(const ModelParams& p, LayerKind kind, cplx lambda, double* sign_changes = nullptr);
ReducedReport reduced_front_back_spectrum(const ModelParams& p, const SpectralConfig& cfg, LayerKind kind);

void write_contour_json(const std::vector<ContourReport>& reports, const std::string& path);
void write_scan_csv(const ContourReport& report, const std::string& path);

}  // namespace fhn
