#include "scurv/finsler.hpp"

#include <algorithm>
#include <cmath>

#include "scurv/errors.hpp"
#include "scurv/phifn.hpp"

namespace scurv {
namespace {

// Joint jet over (x1, x2, y1, y2): slots 0,1 carry chart derivatives, 2,3
// carry fiber derivatives. The scalar ring S is double for values and
// Dual<double> when one extra y-derivative has to ride along.
template <class S>
using J4 = Jet2<S, 4>;

template <class S>
J4<S> lift_chart(const SJet& a) {
    J4<S> r;
    r.v = S(a.v);
    for (std::size_t i = 0; i < 2; ++i) {
        r.g[i] = S(a.g[i]);
        for (std::size_t j = 0; j < 2; ++j) r.h[i][j] = S(a.h[i][j]);
    }
    return r;
}

template <class S>
J4<S> f_squared_jet(const MetricSpec& spec, const Vec2& x, const std::array<S, 2>& y,
                    S* F_out) {
    auto aj = spec.alpha_field(x);
    auto bj = spec.beta_field(x);

    J4<S> Y[2] = {J4<S>::variable(y[0], 2), J4<S>::variable(y[1], 3)};

    J4<S> alpha2;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) alpha2 = alpha2 + lift_chart<S>(aj[i][j]) * Y[i] * Y[j];
    if (!(value_of(alpha2.v) > 0.0)) throw NullVectorError("F undefined at y = 0");

    J4<S> beta = lift_chart<S>(bj[0]) * Y[0] + lift_chart<S>(bj[1]) * Y[1];

    J4<S> alpha = sqrt(alpha2);
    J4<S> s = beta / alpha;

    auto pj = detail::phi_jet_t<S>(spec.phi, s.v);
    if (!(value_of(pj.phi) > 0.0)) throw DomainError("phi <= 0 along this direction");
    J4<S> F = alpha * compose(pj.phi, pj.d1, pj.d2, s);

    if (F_out) *F_out = F.v;
    return F * F;
}

template <class S>
std::array<S, 2> spray_vec(const MetricSpec& spec, const Vec2& x, const std::array<S, 2>& y,
                           S* F_out, std::array<S, 3>* g_out) {
    S F;
    J4<S> F2 = f_squared_jet<S>(spec, x, y, &F);

    S g00 = 0.5 * F2.h[2][2];
    S g01 = 0.5 * F2.h[2][3];
    S g11 = 0.5 * F2.h[3][3];
    S dg = g00 * g11 - g01 * g01;
    if (!(value_of(dg) > 0.0) || !(value_of(g00) > 0.0))
        throw SingularGError("fundamental tensor not positive definite");

    // G^i = (1/4) g^{il} { [F^2]_{x^k y^l} y^k - [F^2]_{x^l} }
    S rhs0 = F2.h[0][2] * y[0] + F2.h[1][2] * y[1] - F2.g[0];
    S rhs1 = F2.h[0][3] * y[0] + F2.h[1][3] * y[1] - F2.g[1];
    S i00 = g11 / dg, i01 = -g01 / dg, i11 = g00 / dg;

    if (F_out) *F_out = F;
    if (g_out) *g_out = {g00, g01, g11};
    return {0.25 * (i00 * rhs0 + i01 * rhs1), 0.25 * (i01 * rhs0 + i11 * rhs1)};
}

constexpr double kBFloor = 1e-12;

}  // namespace

std::pair<double, Mat2> fundamental(const MetricSpec& spec, const Vec2& x, const Vec2& y) {
    double F = 0.0;
    J4<double> F2 = f_squared_jet<double>(spec, x, {y[0], y[1]}, &F);
    Mat2 g;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) g[i][j] = 0.5 * F2.h[2 + i][2 + j];
    return {F, g};
}

SprayEval spray(const MetricSpec& spec, const Vec2& x, const Vec2& y) {
    SprayEval out;
    std::array<double, 3> gpack{};
    auto G = spray_vec<double>(spec, x, {y[0], y[1]}, &out.F, &gpack);
    out.g = {{{gpack[0], gpack[1]}, {gpack[1], gpack[2]}}};
    out.G = {G[0], G[1]};
    return out;
}

double sigma_bh(const MetricSpec& spec, const Vec2& x) {
    RSData rs = rs_decompose(spec, x);
    double b = std::sqrt(std::max(0.0, rs.b2));
    if (!(b < spec.phi.b_o)) throw RegularityError("beta norm reaches b_o");
    double f;
    try {
        f = f_of_b(spec.phi, spec.n, b);
    } catch (const DomainError& e) {
        throw RegularityError(e.what());
    }
    double da = det(rs.a);
    if (!(da > 0.0)) throw SingularMetricError("det a <= 0");
    return f * std::sqrt(da);
}

double sigma_bh_polar(const MetricSpec& spec, const Vec2& x) {
    // area of {F(x, .) < 1} by the polar formula (1/2) int r(theta)^2 dtheta;
    // the rectangle rule on a periodic integrand converges spectrally.
    constexpr int kNodes = 512;
    double area = 0.0;
    for (int k = 0; k < kNodes; ++k) {
        double th = 2.0 * M_PI * (double(k) / kNodes);
        Vec2 u{std::cos(th), std::sin(th)};
        double F = fundamental(spec, x, u).first;
        if (!(F > 0.0) || !std::isfinite(F))
            throw RegularityError("F not positive on the indicatrix sweep");
        double r = 1.0 / F;
        area += 0.5 * r * r;
    }
    area *= 2.0 * M_PI / kNodes;
    if (!std::isfinite(area) || !(area > 0.0)) throw QuadratureError("unit-ball area collapsed");
    return M_PI / area;
}

PointContext point_context(const MetricSpec& spec, const Vec2& x) {
    PointContext ctx;
    ctx.rs = rs_decompose(spec, x);
    ctx.b = std::sqrt(std::max(0.0, ctx.rs.b2));

    // grad ln sigma = (f'(b)/f(b)) (r_m + s_m)/b + (1/2) d_m ln det a.
    // At b = 0 the first term vanishes with (r_m + s_m), so it is dropped.
    auto aj = spec.alpha_field(x);
    Vec2 dlndet{};
    for (std::size_t m = 0; m < 2; ++m) {
        double acc = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) acc += ctx.rs.a_inv[i][j] * aj[i][j].g[m];
        dlndet[m] = acc;
    }

    if (ctx.b > kBFloor) {
        ctx.f = f_of_b(spec.phi, spec.n, ctx.b);
        ctx.fp = f_prime_of_b(spec.phi, spec.n, ctx.b);
        double ratio = ctx.fp / (ctx.f * ctx.b);
        for (std::size_t m = 0; m < 2; ++m)
            ctx.grad_ln_sigma[m] =
                ratio * (ctx.rs.r_vec[m] + ctx.rs.s_vec[m]) + 0.5 * dlndet[m];
    } else {
        ctx.f = f_of_b(spec.phi, spec.n, 0.0);
        ctx.fp = 0.0;
        for (std::size_t m = 0; m < 2; ++m) ctx.grad_ln_sigma[m] = 0.5 * dlndet[m];
    }
    return ctx;
}

Vec2 grad_ln_sigma_bh(const MetricSpec& spec, const Vec2& x) {
    return point_context(spec, x).grad_ln_sigma;
}

double s_curvature_direct(const MetricSpec& spec, const PointContext& ctx, const Vec2& x,
                          const Vec2& y) {
    using D = Dual<double>;
    double divG = 0.0;
    for (std::size_t m = 0; m < 2; ++m) {
        std::array<D, 2> yd{D(y[0], m == 0 ? 1.0 : 0.0), D(y[1], m == 1 ? 1.0 : 0.0)};
        auto G = spray_vec<D>(spec, x, yd, nullptr, nullptr);
        divG += G[m].d;
    }
    return divG - (y[0] * ctx.grad_ln_sigma[0] + y[1] * ctx.grad_ln_sigma[1]);
}

double s_curvature_direct(const MetricSpec& spec, const Vec2& x, const Vec2& y) {
    return s_curvature_direct(spec, point_context(spec, x), x, y);
}

double s_curvature_formula(const MetricSpec& spec, const PointContext& ctx, const Vec2& x,
                           const Vec2& y) {
    (void)x;
    const RSData& rs = ctx.rs;
    if (ctx.b <= kBFloor) throw BZeroError("closed form needs b > 0");

    double alpha = std::sqrt(inner(rs.a, y, y));
    if (!(alpha > 0.0)) throw NullVectorError("S undefined at y = 0");
    double s = dot(rs.b_low, y) / alpha;

    PhiPack pk = q_pack(spec.phi, s, rs.b2, spec.n);
    double r0 = dot(rs.r_vec, y);
    double s0 = dot(rs.s_vec, y);
    double r00 = inner(rs.r, y, y);

    return (2.0 * pk.Psi - ctx.fp / (ctx.b * ctx.f)) * (r0 + s0) -
           (pk.Phi / (2.0 * pk.Delta * pk.Delta)) * (r00 - 2.0 * alpha * pk.Q * s0) / alpha;
}

double s_curvature_formula(const MetricSpec& spec, const Vec2& x, const Vec2& y) {
    return s_curvature_formula(spec, point_context(spec, x), x, y);
}

std::pair<double, double> isotropy_fit(const MetricSpec& spec, const Vec2& x,
                                       const std::vector<Vec2>& y_samples) {
    if (y_samples.size() < 8)
        throw ParamError("isotropy fit needs at least 8 sample directions");
    PointContext ctx = point_context(spec, x);

    std::vector<double> S(y_samples.size()), F(y_samples.size());
    for (std::size_t k = 0; k < y_samples.size(); ++k) {
        S[k] = s_curvature_direct(spec, ctx, x, y_samples[k]);
        F[k] = fundamental(spec, x, y_samples[k]).first;
    }

    // least squares for c in S = (n+1) c F
    double np1 = double(spec.n + 1);
    double num = 0.0, den = 0.0, fmax = 0.0;
    for (std::size_t k = 0; k < S.size(); ++k) {
        num += S[k] * F[k];
        den += F[k] * F[k];
        fmax = std::max(fmax, F[k]);
    }
    if (!(den > 0.0) || !(fmax > 0.0)) throw ParamError("degenerate direction sample");
    double c_hat = num / (np1 * den);

    double resid = 0.0;
    for (std::size_t k = 0; k < S.size(); ++k)
        resid = std::max(resid, std::fabs(S[k] - np1 * c_hat * F[k]));
    return {c_hat, resid / fmax};
}

std::vector<Vec2> unit_directions(int count) {
    if (count < 1) throw ParamError("direction count must be positive");
    std::vector<Vec2> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        double th = 2.0 * M_PI * (double(k) / count);
        out.push_back({std::cos(th), std::sin(th)});
    }
    return out;
}

}  // namespace scurv
