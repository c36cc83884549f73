#pragma once
#include <utility>
#include <vector>

#include "scurv/fields.hpp"
#include "scurv/linalg.hpp"
#include "scurv/riemann.hpp"

namespace scurv {

struct SprayEval {
    double F = 0.0;
    Mat2 g{};
    Vec2 G{};
};

struct SCurvatureReport {
    double S_direct = 0.0;
    double S_formula = 0.0;
    double c_hat = 0.0;
    double residual = 0.0;
};

// shared per-point data so direction sweeps do not recompute the density gradient
struct PointContext {
    RSData rs;
    double b = 0.0;
    double f = 1.0;
    double fp = 0.0;
    Vec2 grad_ln_sigma{};
};

std::pair<double, Mat2> fundamental(const MetricSpec& spec, const Vec2& x, const Vec2& y);
SprayEval spray(const MetricSpec& spec, const Vec2& x, const Vec2& y);

double sigma_bh(const MetricSpec& spec, const Vec2& x);
double sigma_bh_polar(const MetricSpec& spec, const Vec2& x);  // unit-ball area oracle, n=2
Vec2 grad_ln_sigma_bh(const MetricSpec& spec, const Vec2& x);

PointContext point_context(const MetricSpec& spec, const Vec2& x);
double s_curvature_direct(const MetricSpec& spec, const PointContext& ctx, const Vec2& x,
                          const Vec2& y);
double s_curvature_direct(const MetricSpec& spec, const Vec2& x, const Vec2& y);
double s_curvature_formula(const MetricSpec& spec, const PointContext& ctx, const Vec2& x,
                           const Vec2& y);
double s_curvature_formula(const MetricSpec& spec, const Vec2& x, const Vec2& y);

std::pair<double, double> isotropy_fit(const MetricSpec& spec, const Vec2& x,
                                       const std::vector<Vec2>& y_samples);

std::vector<Vec2> unit_directions(int count = 16);

}  // namespace scurv
