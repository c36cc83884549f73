#pragma once

// Gauss-Legendre quadrature: cached nodes/weights on [-1,1] found by Newton
// iteration on the Legendre polynomials, plus two drivers. The doubling
// driver is the contract for the volume-factor integrals; the bisecting
// driver handles the antiderivative appearing inside the quartic-root model,
// whose integrand can sharpen near the domain boundary.

#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "scurv/errors.hpp"

namespace scurv {

struct GLRule {
    std::vector<double> x; // nodes on [-1, 1]
    std::vector<double> w;
};

inline const GLRule& gl_rule(int n) {
    static std::map<int, GLRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GLRule r;
    r.x.resize(n);
    r.w.resize(n);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) break;
        }
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        r.w[n - 1 - i] = r.w[i];
    }
    return cache.emplace(n, std::move(r)).first->second;
}

template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
    const GLRule& r = gl_rule(n);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += r.w[i] * f(mid + half * r.x[i]);
    return acc * half;
}

// Doubles the node count until two successive estimates agree to reltol
// (relative, guarded by 1). Starts at n0, at most max_doublings doublings.
template <class F>
double integrate_doubling(F&& f, double a, double b, int n0, double reltol, int max_doublings) {
    double prev = integrate_gl(f, a, b, n0);
    int n = n0;
    for (int k = 0; k < max_doublings; ++k) {
        n *= 2;
        double cur = integrate_gl(f, a, b, n);
        if (std::fabs(cur - prev) <= reltol * (std::fabs(cur) + 1.0)) return cur;
        prev = cur;
    }
    throw QuadratureError("quadrature did not settle after node doublings");
}

namespace detail {
template <class F>
double adaptive_gl_rec(F& f, double a, double b, double whole, double tol, int depth) {
    double mid = 0.5 * (a + b);
    double left = integrate_gl(f, a, mid, 16);
    double right = integrate_gl(f, mid, b, 16);
    double err = std::fabs(left + right - whole);
    // the relative escape stops subdivision once panels reach machine precision
    if (err <= tol || err <= 1e-15 * (std::fabs(left) + std::fabs(right)) || depth >= 30)
        return left + right;
    double sub = std::max(0.5 * tol, 1e-17);
    return adaptive_gl_rec(f, a, mid, left, sub, depth + 1) +
           adaptive_gl_rec(f, mid, b, right, sub, depth + 1);
}
} // namespace detail

// Bisecting adaptive driver with a 16-point panel rule.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    double whole = integrate_gl(f, a, b, 16);
    return detail::adaptive_gl_rec(f, a, b, whole, tol, 0);
}

} // namespace scurv
