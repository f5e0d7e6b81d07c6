#pragma once

#include "fhn/model.hpp"

#include <complex>
#include <string>
#include <vector>

namespace fhn {

using cplx = std::complex<double>;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

/// Constant limit of the linearization as xi -> +-infinity.
struct AsymptoticMatrix {
    CMat3 entries;
    cplx lambda;
    double speed;
    ModelParams params;
};

AsymptoticMatrix asymptotic_matrix(const ModelParams& p, double c, cplx lambda);

/// Closed-form spatial eigenvalues of A_inf: mu1 = -(eps*gamma+lambda)/c and the
/// pair from the (u, q) block, principal square root.
struct SpatialEigenvalues {
    cplx mu1;
    cplx mu_plus;
    cplx mu_minus;
};
SpatialEigenvalues spatial_eigenvalues(const ModelParams& p, double c, cplx lambda);

enum class EssentialBranch { line, parabola };

struct CurvePoint {
    double l;
    cplx lambda;
    EssentialBranch branch;
};

std::vector<CurvePoint> essential_curves(const ModelParams& p, double c, const std::vector<double>& l_grid);

bool right_of_essential(const ModelParams& p, cplx lambda);

/// Number of spatial eigenvalues with positive real part; throws DomainError on
/// or left of the essential spectrum.
int morse_index(const ModelParams& p, double c, cplx lambda);

void write_essential_csv(const std::vector<CurvePoint>& pts, const std::string& path);

}  // namespace fhn
