#include "scurv/phifn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace scurv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double root_bound(double k) {
    // largest s with 1 + k s^2 > 0
    return k < 0.0 ? 1.0 / std::sqrt(-k) : kInf;
}

}  // namespace

PhiModel PhiModel::excluded_family(double k1, double k2, double k3, double b_o) {
    if (!(k1 > 0.0)) throw ParamError("excluded_family: k1 must be > 0");
    PhiModel m;
    m.variant = PhiVariant::ExcludedFamily;
    m.k1 = k1;
    m.k2 = k2;
    m.k3 = k3;
    if (b_o > 0.0) {
        m.b_o = b_o;
    } else {
        double s1 = root_bound(k2);
        // positivity: k1 sqrt(1+k2 s^2) = |k3 s| crossing
        double s2 = kInf;
        double dz = k3 * k3 - k1 * k1 * k2;
        if (k3 != 0.0 && dz > 0.0) s2 = std::sqrt(k1 * k1 / dz);
        m.b_o = std::min(s1, s2);
    }
    return m;
}

PhiModel PhiModel::class_iv(double k1, double k2, int sign, double b_o) {
    if (k2 < k1) throw ParamError("class_iv: requires k2 >= k1");
    if (sign != 1 && sign != -1) throw ParamError("class_iv: sign must be +1 or -1");
    PhiModel m;
    m.variant = PhiVariant::ClassIV;
    m.k1 = k1;
    m.k2 = k2;
    m.sign = sign;
    m.b_o = b_o > 0.0 ? b_o : std::min(root_bound(k1), root_bound(k2));
    return m;
}

PhiModel PhiModel::series(std::vector<double> a, double b_o) {
    if (a.empty()) throw ParamError("series: needs at least one coefficient");
    PhiModel m;
    m.variant = PhiVariant::Series;
    m.coeffs = std::move(a);
    m.b_o = b_o;
    return m;
}

PhiJet phi_jet(const PhiModel& m, double s) {
    auto j = detail::phi_jet_t(m, s);
    return {j.phi, j.d1, j.d2, j.d3};
}

PhiPack q_pack(const PhiModel& m, double s, double b2, int n) {
    if (s * s > b2 + 1e-12) throw DomainError("q_pack: s^2 > b^2");
    PhiJet j = phi_jet(m, s);
    double w = j.phi - s * j.d1;
    if (std::abs(w) < 1e-12 * (1.0 + std::abs(j.phi) + std::abs(s * j.d1)))
        throw SingularPhiError("q_pack: phi - s phi' vanishes");
    auto core = detail::pack_core(m, s, b2, n);
    if (std::abs(core.Delta) <
        1e-12 * (1.0 + std::abs(s * core.Q) + std::abs((b2 - s * s) * core.Qp)))
        throw SingularDeltaError("q_pack: Delta vanishes");
    auto dual = detail::pack_core(m, Dual<double>(s, 1.0), b2, n);
    return {core.Q, core.Qp, core.Qpp, core.Delta, core.Psi, core.Phi, dual.expr.d};
}

double f_of_b(const PhiModel& m, int n, double b) {
    if (b < 0.0 || !(b < m.b_o)) throw DomainError("f_of_b: b outside [0, b_o)");
    const double pi = 3.14159265358979323846;
    auto weight = [n](double t) {
        return n == 2 ? 1.0 : std::pow(std::sin(t), n - 2);
    };
    auto den = [&](double t) {
        double p = phi_jet(m, b * std::cos(t)).phi;
        if (!(p > 0.0)) throw DomainError("f_of_b: phi <= 0 on the circle");
        return weight(t) / std::pow(p, n);
    };
    double top = integrate_doubling(weight, 0.0, pi, 64, 1e-12, 4);
    double bottom = integrate_doubling(den, 0.0, pi, 64, 1e-12, 4);
    return top / bottom;
}

double f_prime_of_b(const PhiModel& m, int n, double b) {
    // f is even in b, so negative stencil arguments fold back
    auto fv = [&](double t) { return f_of_b(m, n, std::abs(t)); };
    auto stencil = [&](double h) {
        return (-fv(b + 2 * h) + 8 * fv(b + h) - 8 * fv(b - h) + fv(b - 2 * h)) / (12 * h);
    };
    double h = 1e-4 * (1.0 + b);
    double d1 = stencil(h);
    double d2 = stencil(h / 2);
    return (16.0 * d2 - d1) / 15.0;
}

namespace {

// regularity integrand; NaN marks an invalid (out of domain) sample
double margin_at(const PhiModel& m, double s, double rho) {
    try {
        PhiJet j = phi_jet(m, s);
        return j.phi - s * j.d1 + (rho * rho - s * s) * j.d2;
    } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

double golden_min(const std::function<double(double)>& f, double lo, double hi) {
    const double inv = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv * (b - a), d = a + inv * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80 && (b - a) > 1e-12; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv * (b - a);
            fd = f(d);
        }
    }
    return std::min(fc, fd);
}

}  // namespace

double regularity_margin(const PhiModel& m, double b0) {
    const int nrho = 41, ns = 401;
    double best = kInf;
    double best_s = 0.0, best_rho = b0;
    bool invalid = false;
    for (int i = 0; i < nrho; ++i) {
        double rho = b0 * double(i) / (nrho - 1);
        for (int k = 0; k < ns; ++k) {
            double s = rho * (2.0 * double(k) / (ns - 1) - 1.0);
            double v = margin_at(m, s, rho);
            if (std::isnan(v)) {
                invalid = true;
            } else if (v < best) {
                best = v;
                best_s = s;
                best_rho = rho;
            }
        }
    }
    if (best == kInf) return 0.0;  // nothing evaluable: not certifiable
    double step_s = 2.0 * best_rho / (ns - 1);
    auto clampf = [&](double v) { return std::isnan(v) ? kInf : v; };
    if (best_rho > 0.0) {
        double lo = std::max(-best_rho, best_s - step_s);
        double hi = std::min(best_rho, best_s + step_s);
        best = std::min(best, golden_min([&](double s) { return clampf(margin_at(m, s, best_rho)); }, lo, hi));
    }
    double step_r = b0 / (nrho - 1);
    double rlo = std::max(std::abs(best_s), best_rho - step_r);
    double rhi = std::min(b0, best_rho + step_r);
    if (rhi > rlo)
        best = std::min(best, golden_min([&](double r) { return clampf(margin_at(m, best_s, r)); }, rlo, rhi));
    if (invalid) best = std::min(best, 0.0);
    return best;
}

}  // namespace scurv
