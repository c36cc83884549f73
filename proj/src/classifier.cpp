#include "scurv/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "scurv/phifn.hpp"
#include "scurv/riemann.hpp"

namespace scurv {

namespace {

double fro(const Mat2& x, const Mat2& y) {
    double acc = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) acc += x[i][j] * y[i][j];
    return acc;
}

Mat2 outer_sym(const Vec2& u, const Vec2& v) {
    Mat2 m{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m[i][j] = u[i] * v[j] + u[j] * v[i];
    return m;
}

constexpr double kIdentify = 1e-12;  // basis column smaller than this (relative) is dropped

}  // namespace

StructureFit fit_structure(const RSData& rs, const Mat2& a) {
    Mat2 basis_k = a;
    Mat2 basis_eps{};
    Mat2 basis_lam{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) basis_eps[i][j] = -rs.b_low[i] * rs.b_low[j];
    Mat2 bs = outer_sym(rs.b_low, rs.s_vec);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) basis_lam[i][j] = -bs[i][j];

    double scale = std::sqrt(fro(basis_k, basis_k));
    StructureFit fit;
    fit.epsilon_identifiable = std::sqrt(fro(basis_eps, basis_eps)) > kIdentify * scale;
    fit.lambda_identifiable = std::sqrt(fro(basis_lam, basis_lam)) > kIdentify * scale;

    // active columns in fixed order; on a singular normal system the last
    // column is dropped and the solve repeats, so ties resolve the same way
    // every run
    std::vector<const Mat2*> cols{&basis_k};
    std::vector<int> which{0};
    if (fit.epsilon_identifiable) {
        cols.push_back(&basis_eps);
        which.push_back(1);
    }
    if (fit.lambda_identifiable) {
        cols.push_back(&basis_lam);
        which.push_back(2);
    }

    std::vector<double> coeff;
    while (!cols.empty()) {
        std::size_t m = cols.size();
        std::vector<double> G(m * m), rhs(m);
        for (std::size_t p = 0; p < m; ++p) {
            rhs[p] = fro(*cols[p], rs.r);
            for (std::size_t q = 0; q < m; ++q) G[p * m + q] = fro(*cols[p], *cols[q]);
        }
        if (solve_dense(G, rhs, m, coeff)) break;
        int dropped = which.back();
        if (dropped == 1) fit.epsilon_identifiable = false;
        if (dropped == 2) fit.lambda_identifiable = false;
        cols.pop_back();
        which.pop_back();
    }

    for (std::size_t p = 0; p < which.size() && p < coeff.size(); ++p) {
        if (which[p] == 0) fit.k = coeff[p];
        if (which[p] == 1) fit.epsilon = coeff[p];
        if (which[p] == 2) fit.lambda = coeff[p];
    }

    Mat2 recon{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            recon[i][j] = fit.k * basis_k[i][j] + fit.epsilon * basis_eps[i][j] +
                          fit.lambda * basis_lam[i][j];
    double acc = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double d = rs.r[i][j] - recon[i][j];
            acc += d * d;
        }
    fit.rms = std::sqrt(acc / 4.0);
    return fit;
}

ClassReport classify(const MetricSpec& spec, const std::vector<Vec2>& sample_points,
                     double tolerance) {
    if (spec.n != 2) throw DimensionError("the fourth class test needs a two-dimensional chart");

    constexpr double inf = std::numeric_limits<double>::infinity();
    ClassReport rep;
    rep.tolerance = tolerance;

    const bool phi_is_fourth = spec.phi.variant == PhiVariant::ClassIV;
    double res_i_beta = 0.0, res_i_phi = 0.0;
    double res_ii_beta = 0.0;
    double res_iii = 0.0;
    double res_iv_beta = phi_is_fourth ? 0.0 : inf;
    std::vector<double> k_samples;  // the constant-k fit pools every point and grid node

    for (const Vec2& x : sample_points) {
        RSData rs = rs_decompose(spec, x);
        double b = std::sqrt(std::max(rs.b2, 0.0));

        Vec2 drift{rs.r_vec[0] + rs.s_vec[0], rs.r_vec[1] + rs.s_vec[1]};
        res_i_beta = std::max(res_i_beta, std::max(std::fabs(drift[0]), std::fabs(drift[1])));

        // metric-proportional shape with pointwise coefficient, plus closedness
        Mat2 M{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                M[i][j] = rs.b2 * rs.a[i][j] - rs.b_low[i] * rs.b_low[j];
        double mm = fro(M, M);
        double eps_hat = mm > 1e-30 ? fro(rs.r, M) / mm : 0.0;
        double mis = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double d = rs.r[i][j] - eps_hat * M[i][j];
                mis += d * d;
            }
        double s_norm = std::max(std::fabs(rs.s_vec[0]), std::fabs(rs.s_vec[1]));
        res_ii_beta = std::max(res_ii_beta, std::max(std::sqrt(mis), s_norm));

        double r_norm = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r_norm = std::max(r_norm, std::fabs(rs.r[i][j]));
        res_iii = std::max(res_iii, std::max(r_norm, s_norm));

        if (phi_is_fourth) {
            double k1 = spec.phi.k1, k2 = spec.phi.k2;
            double den = 4.0 + (k1 + 3.0 * k2) * rs.b2;
            if (std::fabs(den) <= 1e-12) {
                res_iv_beta = inf;
            } else {
                double coef = (3.0 * k1 + k2 + 4.0 * k1 * k2 * rs.b2) / den;
                Mat2 want = outer_sym(rs.b_low, rs.s_vec);
                double d2 = 0.0;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        double d = rs.r[i][j] - coef * want[i][j];
                        d2 += d * d;
                    }
                res_iv_beta = std::max(res_iv_beta, std::sqrt(d2));
            }
        }

        // phi-side grids carry the point's own norm, since the scalars
        // depend on b^2 as well as s
        if (b > 1e-9) {
            for (int j = 0; j <= 20; ++j) {
                double s = -0.9 * b + 1.8 * b * j / 20.0;
                PhiPack pk = q_pack(spec.phi, s, rs.b2, spec.n);
                res_i_phi = std::max(res_i_phi, std::fabs(pk.Phi));
                double phiv = phi_jet(spec.phi, s).phi;
                double den = 2.0 * (spec.n + 1) * phiv * pk.Delta * pk.Delta;
                k_samples.push_back(-pk.Phi * (rs.b2 - s * s) / den);
            }
        } else {
            PhiPack pk = q_pack(spec.phi, 0.0, rs.b2, spec.n);
            res_i_phi = std::max(res_i_phi, std::fabs(pk.Phi));
        }

        auto [c_hat, iso] = isotropy_fit(spec, x, unit_directions(16));
        rep.c_fit.push_back(c_hat);
        rep.isotropy_residual = std::max(rep.isotropy_residual, iso);
    }

    double res_ii_phi = 0.0;
    if (!k_samples.empty()) {
        double mean = 0.0;
        for (double k : k_samples) mean += k;
        mean /= static_cast<double>(k_samples.size());
        for (double k : k_samples) res_ii_phi = std::max(res_ii_phi, std::fabs(k - mean));
    }

    rep.class_i = {res_i_beta, res_i_phi, res_i_beta <= tolerance && res_i_phi <= tolerance};
    rep.class_ii = {res_ii_beta, res_ii_phi, res_ii_beta <= tolerance && res_ii_phi <= tolerance};
    rep.class_iii = {res_iii, 0.0, res_iii <= tolerance};
    double res_iv_phi = phi_is_fourth ? 0.0 : inf;
    rep.class_iv = {res_iv_beta, res_iv_phi,
                    res_iv_beta <= tolerance && res_iv_phi <= tolerance};
    return rep;
}

FrameResiduals adapted_frame_residuals(const MetricSpec& spec, const Vec2& x,
                                       const std::vector<std::pair<double, double>>& sample) {
    PointContext ctx = point_context(spec, x);
    if (ctx.b <= 1e-6) throw BZeroError("adapted frame needs a nonvanishing one-form at x");
    const RSData& rs = ctx.rs;
    double b = ctx.b, b2 = rs.b2;

    Vec2 e1{rs.b_up[0] / b, rs.b_up[1] / b};
    Vec2 u{1.0, 0.0};
    Vec2 v{u[0] - inner(rs.a, u, e1) * e1[0], u[1] - inner(rs.a, u, e1) * e1[1]};
    double nv2 = inner(rs.a, v, v);
    if (nv2 <= 1e-20) {
        u = {0.0, 1.0};
        double p = inner(rs.a, u, e1);
        v = {u[0] - p * e1[0], u[1] - p * e1[1]};
        nv2 = inner(rs.a, v, v);
    }
    double nv = std::sqrt(nv2);
    Vec2 e2{v[0] / nv, v[1] / nv};
    if (e1[0] * e2[1] - e1[1] * e2[0] < 0.0) e2 = {-e2[0], -e2[1]};

    auto comp = [&](const Mat2& t, const Vec2& p, const Vec2& q) {
        double acc = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) acc += t[i][j] * p[i] * q[j];
        return acc;
    };
    double r11 = comp(rs.r, e1, e1);
    double r12 = comp(rs.r, e1, e2);
    double r22 = comp(rs.r, e2, e2);
    double s12 = comp(rs.s, e1, e2);

    double c_hat = isotropy_fit(spec, x, unit_directions(16)).first;
    double bfpf = b * ctx.fp / ctx.f;

    FrameResiduals out;
    for (auto [s, yA] : sample) {
        PhiPack pk = q_pack(spec.phi, s, b2, spec.n);
        double phiv = phi_jet(spec.phi, s).phi;
        double D2 = pk.Delta * pk.Delta;

        double lhs15 = pk.Phi / (2.0 * D2) * (b2 - s * s) * r22 * yA * yA;
        double rhs15 = -(s * (s * pk.Phi / (2.0 * D2) - 2.0 * pk.Psi * b2 + bfpf) * r11 +
                         (spec.n + 1) * c_hat * b2 * phiv) *
                       yA * yA;
        out.res15 = std::max(out.res15, std::fabs(lhs15 - rhs15));

        double lhs16 = (s * pk.Phi / D2 - 2.0 * pk.Psi * b2 + bfpf) * r12 * yA;
        double rhs16 = ((pk.Phi * pk.Q / D2 + 2.0 * pk.Psi) * b2 - bfpf) * s12 * yA;
        out.res16 = std::max(out.res16, std::fabs(lhs16 - rhs16));
    }
    return out;
}

PdeResiduals pde_residuals(const FieldTriple& triple, const CatalogParams& params, const Vec2& x) {
    SJet sg = eval_jet(triple.sigma, x);
    SJet xj = eval_jet(triple.xi, x);
    SJet ej = eval_jet(triple.eta, x);
    double xi = xj.v, xi1 = xj.g[0], xi2 = xj.g[1];
    double eta = ej.v, eta1 = ej.g[0], eta2 = ej.g[1];
    double s1 = sg.g[0], s2 = sg.g[1];

    double P = xi * xi + eta * eta;
    if (P <= 1e-30) throw SingularFrameError("the direction pair vanishes at x");
    if (params.b0 <= 0.0) throw SingularFrameError("nonpositive norm parameter");

    PdeResiduals out;
    double num73 = P * (xi * s1 + eta * s2) - xi * eta * eta1 + xi * xi * eta2 +
                   eta * eta * xi1 - xi * eta * xi2;
    out.eps73 = num73 / (params.b0 * std::exp(sg.v) * std::pow(P, 1.5));

    out.closed74 = P * (xi * s2 - eta * s1) - xi * xi * eta1 - xi * eta * eta2 +
                   xi * eta * xi1 + eta * eta * xi2;

    out.res75[0] = std::fabs(s1 - (eta * xi2 - xi * eta2) / P);
    out.res75[1] = std::fabs(s2 - (xi * eta1 - eta * xi1) / P);

    // the nonconstant-norm system divides by xi and by the product below;
    // where either collapses the three entries degrade to NaN so the rest
    // of the record stays usable
    double a1 = params.a1, a2 = params.a2;
    double k2v = 2.0 * a2 + a1 * a1;
    double k1v = 2.0 * a2 - 3.0 * a1 * a1;
    double t0den = (1.0 + k2v * P) * (1.0 + k1v * P);
    if (std::fabs(xi) <= 1e-12 * std::sqrt(P) || std::fabs(t0den) <= 1e-12) {
        double nan = std::numeric_limits<double>::quiet_NaN();
        out.res76 = {nan, nan, nan};
        return out;
    }
    double T0 = xi * t0den;
    double T1 = 2.0 * xi * eta * (2.0 * (a2 - a1 * a1) + k2v * k1v * P) * xi2 -
                (1.0 + 2.0 * (2.0 * a2 - a1 * a1) * xi * xi + 2.0 * a1 * a1 * eta * eta +
                 k2v * k1v * (std::pow(xi, 4) - std::pow(eta, 4))) *
                    eta2;
    double T2 = (1.0 + 2.0 * a1 * a1 * xi * xi + 2.0 * (2.0 * a2 - a1 * a1) * eta * eta -
                 k2v * k1v * (std::pow(xi, 4) - std::pow(eta, 4))) *
                    (xi * xi2 + eta * eta2) +
                xi * t0den * eta1;
    out.res76[0] = std::fabs(s1 - T1 / T0);
    out.res76[1] = std::fabs(s2 - T2 / (xi * T0));
    out.res76[2] = std::fabs(xi1 + eta * (eta * eta2 + xi * xi2 + xi * eta1) / (xi * xi));
    return out;
}

}  // namespace scurv
