#pragma once
#include <cmath>
#include <vector>

#include "scurv/errors.hpp"
#include "scurv/jets.hpp"
#include "scurv/quadrature.hpp"
#include "scurv/tjet.hpp"

namespace scurv {

enum class PhiVariant { ExcludedFamily, ClassIV, Series };

// phi(s) families:
//   ExcludedFamily  phi = k1*sqrt(1+k2 s^2) + k3 s,   k1 > 0
//   ClassIV         phi = [(1+k1 s^2)(1+k2 s^2)]^{1/4} * exp(int_0^s tau),
//                   tau = sign*sqrt(k2-k1) / (2 (1+k1 t^2) sqrt(1+k2 t^2)),  k2 >= k1
//   Series          phi = sum a_i s^i (truncated; classification requires a_0 = 1)
struct PhiModel {
    PhiVariant variant = PhiVariant::Series;
    double k1 = 0.0, k2 = 0.0, k3 = 0.0;
    int sign = +1;
    std::vector<double> coeffs;
    double b_o = 1.0;

    static PhiModel excluded_family(double k1, double k2, double k3, double b_o = -1.0);
    static PhiModel class_iv(double k1, double k2, int sign, double b_o = -1.0);
    static PhiModel series(std::vector<double> a, double b_o = 1.0);
};

struct PhiJet {
    double phi, d1, d2, d3;
};

struct PhiPack {
    double Q, Qp, Qpp, Delta, Psi, Phi, Upsilon;
};

PhiJet phi_jet(const PhiModel& m, double s);
PhiPack q_pack(const PhiModel& m, double s, double b2, int n = 2);
double f_of_b(const PhiModel& m, int n, double b);
double f_prime_of_b(const PhiModel& m, int n, double b);
double regularity_margin(const PhiModel& m, double b0);

namespace detail {

inline double tau_value(const PhiModel& m, double t) {
    double c = m.sign * std::sqrt(m.k2 - m.k1) / 2.0;
    return c / ((1.0 + m.k1 * t * t) * std::sqrt(1.0 + m.k2 * t * t));
}

inline double tau_integral(const PhiModel& m, double s) {
    if (m.k2 == m.k1 || s == 0.0) return 0.0;
    auto f = [&](double t) { return tau_value(m, t); };
    if (s > 0.0) return integrate_adaptive(f, 0.0, s, 1e-14);
    return -integrate_adaptive(f, s, 0.0, 1e-14);
}

inline double exp_tau_int(const PhiModel& m, double s) { return std::exp(tau_integral(m, s)); }

// d/ds of the integral is the integrand at the upper limit.
inline Dual<double> exp_tau_int(const PhiModel& m, const Dual<double>& s) {
    double e = std::exp(tau_integral(m, s.v));
    return {e, e * tau_value(m, s.v) * s.d};
}

template <class K>
struct PhiJetT {
    K phi, d1, d2, d3;
};

template <class K>
PhiJetT<K> phi_jet_t(const PhiModel& m, const K& s) {
    using TJ = TJet<K, 4>;
    double sv = value_of(s);
    if (!(std::abs(sv) < m.b_o))
        throw DomainError("phi_jet: |s| >= b_o");

    TJ phi;
    if (m.variant == PhiVariant::ExcludedFamily) {
        TJ u2;
        u2.c = {1.0 + m.k2 * s * s, 2.0 * m.k2 * s, K(m.k2), K(0.0)};
        if (value_of(u2.c[0]) <= 0.0) throw DomainError("phi_jet: 1+k2 s^2 <= 0");
        TJ svar = TJ::variable(s);
        phi = sqrt_jet(u2) * K(m.k1) + svar * K(m.k3);
    } else if (m.variant == PhiVariant::ClassIV) {
        TJ u1, u2;
        u1.c = {1.0 + m.k1 * s * s, 2.0 * m.k1 * s, K(m.k1), K(0.0)};
        u2.c = {1.0 + m.k2 * s * s, 2.0 * m.k2 * s, K(m.k2), K(0.0)};
        if (value_of(u1.c[0]) <= 0.0 || value_of(u2.c[0]) <= 0.0)
            throw DomainError("phi_jet: 1+k s^2 <= 0");
        TJ alg = pow_jet(u1 * u2, 0.25);
        double c = m.sign * std::sqrt(m.k2 - m.k1) / 2.0;
        TJ tau = inv_jet(u1 * sqrt_jet(u2)) * K(c);
        TJ E;
        E.c[0] = exp_tau_int(m, s);
        for (std::size_t k = 0; k + 1 < 4; ++k) {
            K acc{};
            for (std::size_t j = 0; j <= k; ++j) acc = acc + tau.c[j] * E.c[k - j];
            E.c[k + 1] = acc / K(double(k + 1));
        }
        phi = alg * E;
    } else {
        // truncated polynomial: exact derivatives from coefficients
        const auto& a = m.coeffs;
        TJ svar = TJ::variable(s);
        for (std::size_t i = a.size(); i-- > 0;) {
            phi = phi * svar + K(a[i]);
        }
    }
    return {phi.deriv(0), phi.deriv(1), phi.deriv(2), phi.deriv(3)};
}

template <class K>
struct PackCore {
    K Q, Qp, Qpp, Delta, Psi, Phi, expr;
};

// Q = phi'/(phi - s phi'), and with w := phi - s phi':
//   Q'  = phi phi'' / w^2
//   Q'' = ((phi' phi'' + phi phi''') w + 2 s phi phi''^2) / w^3
template <class K>
PackCore<K> pack_core(const PhiModel& m, const K& s, double b2, int n) {
    PhiJetT<K> j = phi_jet_t(m, s);
    K w = j.phi - s * j.d1;
    PackCore<K> p;
    p.Q = j.d1 / w;
    p.Qp = j.phi * j.d2 / (w * w);
    p.Qpp = ((j.d1 * j.d2 + j.phi * j.d3) * w + 2.0 * s * j.phi * j.d2 * j.d2) / (w * w * w);
    K bs = K(b2) - s * s;
    p.Delta = 1.0 + s * p.Q + bs * p.Qp;
    p.Psi = p.Qp / (2.0 * p.Delta);
    p.Phi = -(p.Q - s * p.Qp) * (double(n) * p.Delta + s * p.Q + 1.0) -
            bs * (1.0 + s * p.Q) * p.Qpp;
    p.expr = s * p.Phi / (p.Delta * p.Delta) - 2.0 * p.Psi * b2;
    return p;
}

}  // namespace detail
}  // namespace scurv
