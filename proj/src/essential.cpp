#include "fhn/essential.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace fhn {

AsymptoticMatrix asymptotic_matrix(const ModelParams& p, double c, cplx lambda) {
    const double f0 = F0(p);
    AsymptoticMatrix A;
    A.lambda = lambda;
    A.speed = c;
    A.params = p;
    A.entries << 0.0, f0, 0.0,
        f0 * (p.k * p.a + lambda), c * f0 * f0, 0.0,
        p.eps / c, 0.0, -(p.eps * p.gamma + lambda) / c;
    return A;
}

SpatialEigenvalues spatial_eigenvalues(const ModelParams& p, double c, cplx lambda) {
    const double f0 = F0(p);
    const double b = c * f0 * f0;
    const cplx disc = std::sqrt(cplx(b * b) + 4.0 * f0 * f0 * (p.k * p.a + lambda));
    SpatialEigenvalues s;
    s.mu1 = -(p.eps * p.gamma + lambda) / c;
    s.mu_plus = 0.5 * (b + disc);
    s.mu_minus = 0.5 * (b - disc);
    return s;
}

std::vector<CurvePoint> essential_curves(const ModelParams& p, double c, const std::vector<double>& l_grid) {
    const double f0 = F0(p);
    std::vector<CurvePoint> out;
    out.reserve(2 * l_grid.size());
    for (double l : l_grid) {
        out.push_back({l, cplx(-p.eps * p.gamma, -c * l), EssentialBranch::line});
    }
    for (double l : l_grid) {
        out.push_back({l, cplx(-p.k * p.a - l * l / (f0 * f0), -c * l), EssentialBranch::parabola});
    }
    return out;
}

bool right_of_essential(const ModelParams& p, cplx lambda) {
    return (p.eps * p.gamma + lambda).real() > 0.0 && (lambda + p.k * p.a).real() > 0.0;
}

int morse_index(const ModelParams& p, double c, cplx lambda) {
    if (!right_of_essential(p, lambda)) {
        std::ostringstream msg;
        msg << "lambda = " << lambda << " is not right of the essential spectrum";
        throw DomainError(msg.str());
    }
    const SpatialEigenvalues s = spatial_eigenvalues(p, c, lambda);
    int n = 0;
    for (cplx m : {s.mu1, s.mu_plus, s.mu_minus}) {
        if (m.real() > 0.0) ++n;
    }
    return n;
}

void write_essential_csv(const std::vector<CurvePoint>& pts, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << std::setprecision(17) << "l,re_lambda,im_lambda,branch\n";
    for (const auto& q : pts) {
        f << q.l << ',' << q.lambda.real() << ',' << q.lambda.imag() << ','
          << (q.branch == EssentialBranch::line ? "line" : "parabola") << '\n';
    }
}

}  // namespace fhn
