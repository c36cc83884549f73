#pragma once

// Forward-mode machinery used everywhere derivatives are needed:
//   Dual<T>    one directional derivative riding along the value
//   Jet2<S,N>  value + gradient + Hessian in N variables over scalar ring S
// S may itself be Dual<double>, which is how third y-derivatives of the
// spray are obtained without any finite differencing.

#include <array>
#include <cmath>
#include <cstddef>

namespace scurv {

template <class T>
struct Dual {
    T v{};
    T d{};

    Dual() = default;
    Dual(T value) : v(value), d{} {}
    Dual(T value, T dot) : v(value), d(dot) {}
};

inline double value_of(double x) { return x; }
template <class T>
double value_of(const Dual<T>& x) {
    return value_of(x.v);
}

template <class T>
Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
    return {a.v + b.v, a.d + b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
    return {a.v - b.v, a.d - b.d};
}
template <class T>
Dual<T> operator-(const Dual<T>& a) {
    return {-a.v, -a.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    T inv = T(1) / b.v;
    return {a.v * inv, (a.d - a.v * b.d * inv) * inv};
}

template <class T> Dual<T> operator+(const Dual<T>& a, double b) { return {a.v + b, a.d}; }
template <class T> Dual<T> operator+(double a, const Dual<T>& b) { return {a + b.v, b.d}; }
template <class T> Dual<T> operator-(const Dual<T>& a, double b) { return {a.v - b, a.d}; }
template <class T> Dual<T> operator-(double a, const Dual<T>& b) { return {a - b.v, -b.d}; }
template <class T> Dual<T> operator*(const Dual<T>& a, double b) { return {a.v * b, a.d * b}; }
template <class T> Dual<T> operator*(double a, const Dual<T>& b) { return {a * b.v, a * b.d}; }
template <class T> Dual<T> operator/(const Dual<T>& a, double b) { return {a.v / b, a.d / b}; }
template <class T> Dual<T> operator/(double a, const Dual<T>& b) {
    T inv = T(1) / b.v;
    return {a * inv, -a * b.d * inv * inv};
}

using std::exp;
using std::log;
using std::sqrt;

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
    T r = sqrt(a.v);
    return {r, a.d / (2.0 * r)};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
    T e = exp(a.v);
    return {e, a.d * e};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
    return {log(a.v), a.d / a.v};
}
using std::pow;
template <class T>
Dual<T> pow(const Dual<T>& a, double p) {
    T w = pow(a.v, p);
    return {w, a.d * (p * pow(a.v, p - 1.0))};
}

// Second-order jet: u.v, u.g[i] = d_i u, u.h[i][j] = d_i d_j u.
// The Hessian is stored in full; construction keeps it symmetric.
template <class S, std::size_t N>
struct Jet2 {
    S v{};
    std::array<S, N> g{};
    std::array<std::array<S, N>, N> h{};

    static Jet2 constant(S c) {
        Jet2 r;
        r.v = c;
        return r;
    }
    static Jet2 variable(S c, std::size_t i) {
        Jet2 r;
        r.v = c;
        r.g[i] = S(1);
        return r;
    }
};

template <class S, std::size_t N>
Jet2<S, N> operator+(const Jet2<S, N>& a, const Jet2<S, N>& b) {
    Jet2<S, N> r;
    r.v = a.v + b.v;
    for (std::size_t i = 0; i < N; ++i) {
        r.g[i] = a.g[i] + b.g[i];
        for (std::size_t j = 0; j < N; ++j) r.h[i][j] = a.h[i][j] + b.h[i][j];
    }
    return r;
}

template <class S, std::size_t N>
Jet2<S, N> operator-(const Jet2<S, N>& a, const Jet2<S, N>& b) {
    Jet2<S, N> r;
    r.v = a.v - b.v;
    for (std::size_t i = 0; i < N; ++i) {
        r.g[i] = a.g[i] - b.g[i];
        for (std::size_t j = 0; j < N; ++j) r.h[i][j] = a.h[i][j] - b.h[i][j];
    }
    return r;
}

template <class S, std::size_t N>
Jet2<S, N> operator-(const Jet2<S, N>& a) {
    Jet2<S, N> r;
    r.v = -a.v;
    for (std::size_t i = 0; i < N; ++i) {
        r.g[i] = -a.g[i];
        for (std::size_t j = 0; j < N; ++j) r.h[i][j] = -a.h[i][j];
    }
    return r;
}

template <class S, std::size_t N>
Jet2<S, N> operator*(const Jet2<S, N>& a, const Jet2<S, N>& b) {
    Jet2<S, N> r;
    r.v = a.v * b.v;
    for (std::size_t i = 0; i < N; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            r.h[i][j] = a.h[i][j] * b.v + a.g[i] * b.g[j] + a.g[j] * b.g[i] + a.v * b.h[i][j];
    return r;
}

template <class S, std::size_t N>
Jet2<S, N> scale(const Jet2<S, N>& a, S c) {
    Jet2<S, N> r;
    r.v = a.v * c;
    for (std::size_t i = 0; i < N; ++i) {
        r.g[i] = a.g[i] * c;
        for (std::size_t j = 0; j < N; ++j) r.h[i][j] = a.h[i][j] * c;
    }
    return r;
}

template <class S, std::size_t N>
Jet2<S, N> operator*(const Jet2<S, N>& a, double c) {
    return scale(a, S(c));
}
template <class S, std::size_t N>
Jet2<S, N> operator*(double c, const Jet2<S, N>& a) {
    return scale(a, S(c));
}

template <class S, std::size_t N>
Jet2<S, N> operator+(const Jet2<S, N>& a, double c) {
    Jet2<S, N> r = a;
    r.v = r.v + c;
    return r;
}
template <class S, std::size_t N>
Jet2<S, N> operator+(double c, const Jet2<S, N>& a) {
    return a + c;
}
template <class S, std::size_t N>
Jet2<S, N> operator-(const Jet2<S, N>& a, double c) {
    return a + (-c);
}
template <class S, std::size_t N>
Jet2<S, N> operator-(double c, const Jet2<S, N>& a) {
    return (-a) + c;
}
template <class S, std::size_t N>
Jet2<S, N> operator/(const Jet2<S, N>& a, double c) {
    return a * (1.0 / c);
}

// Apply a univariate map with derivatives (f0, f1, f2) at u.v by chain rule.
template <class S, std::size_t N>
Jet2<S, N> compose(S f0, S f1, S f2, const Jet2<S, N>& u) {
    Jet2<S, N> r;
    r.v = f0;
    for (std::size_t i = 0; i < N; ++i) r.g[i] = f1 * u.g[i];
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r.h[i][j] = f2 * u.g[i] * u.g[j] + f1 * u.h[i][j];
    return r;
}

template <class S, std::size_t N>
Jet2<S, N> inv(const Jet2<S, N>& u) {
    S i0 = S(1) / u.v;
    return compose(i0, -i0 * i0, 2.0 * i0 * i0 * i0, u);
}

template <class S, std::size_t N>
Jet2<S, N> operator/(const Jet2<S, N>& a, const Jet2<S, N>& b) {
    return a * inv(b);
}

template <class S, std::size_t N>
Jet2<S, N> sqrt(const Jet2<S, N>& u) {
    S r0 = sqrt(u.v);
    S r1 = S(0.5) / r0;
    return compose(r0, r1, -S(0.5) * r1 / u.v, u);
}

template <class S, std::size_t N>
Jet2<S, N> exp(const Jet2<S, N>& u) {
    S e = exp(u.v);
    return compose(e, e, e, u);
}

template <class S, std::size_t N>
Jet2<S, N> log(const Jet2<S, N>& u) {
    S i0 = S(1) / u.v;
    return compose(log(u.v), i0, -i0 * i0, u);
}

template <class S, std::size_t N>
Jet2<S, N> operator/(double c, const Jet2<S, N>& a) {
    return scale(inv(a), S(c));
}

template <class S, std::size_t N>
Jet2<S, N> pow(const Jet2<S, N>& u, double p) {
    S f0 = pow(u.v, p);
    S f1 = pow(u.v, p - 1.0) * p;
    S f2 = pow(u.v, p - 2.0) * (p * (p - 1.0));
    return compose(f0, f1, f2, u);
}

} // namespace scurv
