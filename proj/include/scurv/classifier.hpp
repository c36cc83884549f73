#pragma once

#include <array>
#include <utility>
#include <vector>

#include "scurv/finsler.hpp"

namespace scurv {

// Least-squares decomposition of r_ij over the basis
// { a_ij, -b_i b_j, -(b_i s_j + b_j s_i) }. A basis element that vanishes
// (parallel data, zero norm) makes the matching coefficient unidentifiable;
// the fit then runs on the surviving columns and the flag is cleared.
struct StructureFit {
    double k = 0.0;
    double epsilon = 0.0;
    double lambda = 0.0;
    bool k_identifiable = true;
    bool epsilon_identifiable = true;
    bool lambda_identifiable = true;
    double rms = 0.0;  // entrywise rms of r_ij minus the reconstruction
};

StructureFit fit_structure(const RSData& rs, const Mat2& a);

// One classification verdict: a condition on the one-form data and a
// condition on phi, each as a residual. pass requires both at tolerance.
struct ClassVerdict {
    double beta_residual = 0.0;
    double phi_residual = 0.0;
    bool pass = false;
};

// Residuals for the four isotropy classes, evaluated over a point sample.
// Verdicts are non-exclusive: degenerate data can land in several classes
// at once. The isotropy fit (c_fit per point, worst residual) is reported
// alongside but does not gate the verdicts.
struct ClassReport {
    ClassVerdict class_i;
    ClassVerdict class_ii;
    ClassVerdict class_iii;
    ClassVerdict class_iv;
    std::vector<double> c_fit;
    double isotropy_residual = 0.0;
    double tolerance = 0.0;
};

ClassReport classify(const MetricSpec& spec, const std::vector<Vec2>& sample_points,
                     double tolerance = 1e-8);

// Residuals of the two adapted-frame scalar equations equivalent to
// isotropic S-curvature at x. The frame is a-orthonormal with e1 along the
// dual of the one-form; sample entries are (s, yA) with |s| < b(x).
struct FrameResiduals {
    double res15 = 0.0;
    double res16 = 0.0;
};

FrameResiduals adapted_frame_residuals(const MetricSpec& spec, const Vec2& x,
                                       const std::vector<std::pair<double, double>>& sample);

// Pointwise residuals of the conformally flat PDE characterizations, all in
// terms of the raw (sigma, xi, eta) triple and its first derivatives.
//   eps73    value of the isotropy factor for the constant-norm ansatz
//   closed74 obstruction to the one-form being closed (0 iff closed)
//   res75    both components of the closed + eps = 0 reduction
//   res76    the three components of the nonconstant-norm system
struct PdeResiduals {
    double eps73 = 0.0;
    double closed74 = 0.0;
    std::array<double, 2> res75{};
    std::array<double, 3> res76{};
};

PdeResiduals pde_residuals(const FieldTriple& triple, const CatalogParams& params, const Vec2& x);

}  // namespace scurv
