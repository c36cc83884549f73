#pragma once
#include <array>
#include <cmath>
#include <cstddef>

#include "scurv/jets.hpp"

namespace scurv {

// Truncated Taylor expansion in one variable around a point: c[k] = f^(k)/k!.
// Scalar K is double or Dual<double>; length N fixed at compile time.
template <class K, std::size_t N>
struct TJet {
  std::array<K, N> c{};

  static TJet constant(const K& v) {
    TJet r;
    r.c[0] = v;
    return r;
  }
  static TJet variable(const K& v) {
    TJet r;
    r.c[0] = v;
    if constexpr (N > 1) r.c[1] = K(1);
    return r;
  }

  TJet operator+(const TJet& o) const {
    TJet r;
    for (std::size_t k = 0; k < N; ++k) r.c[k] = c[k] + o.c[k];
    return r;
  }
  TJet operator-(const TJet& o) const {
    TJet r;
    for (std::size_t k = 0; k < N; ++k) r.c[k] = c[k] - o.c[k];
    return r;
  }
  TJet operator-() const {
    TJet r;
    for (std::size_t k = 0; k < N; ++k) r.c[k] = -c[k];
    return r;
  }
  TJet operator*(const TJet& o) const {
    TJet r;
    for (std::size_t k = 0; k < N; ++k) {
      K acc{};
      for (std::size_t j = 0; j <= k; ++j) acc = acc + c[j] * o.c[k - j];
      r.c[k] = acc;
    }
    return r;
  }
  TJet operator*(const K& a) const {
    TJet r;
    for (std::size_t k = 0; k < N; ++k) r.c[k] = c[k] * a;
    return r;
  }
  TJet operator+(const K& a) const {
    TJet r = *this;
    r.c[0] = r.c[0] + a;
    return r;
  }
  TJet operator-(const K& a) const {
    TJet r = *this;
    r.c[0] = r.c[0] - a;
    return r;
  }

  // k-th derivative value (not Taylor coefficient)
  K deriv(std::size_t k) const {
    K f = c[k];
    for (std::size_t j = 2; j <= k; ++j) f = f * K(double(j));
    return f;
  }
};

// w = u^p solved from w' u = p u' w: k w_k u_0 = sum_{j=1..k} (p j - (k-j)) u_j w_{k-j}.
template <class K, std::size_t N>
TJet<K, N> pow_jet(const TJet<K, N>& u, double p) {
  using std::pow;
  TJet<K, N> w;
  w.c[0] = pow(u.c[0], p);
  for (std::size_t k = 1; k < N; ++k) {
    K acc{};
    for (std::size_t j = 1; j <= k; ++j)
      acc = acc + u.c[j] * w.c[k - j] * K(p * double(j) - double(k - j));
    w.c[k] = acc / (u.c[0] * K(double(k)));
  }
  return w;
}

template <class K, std::size_t N>
TJet<K, N> sqrt_jet(const TJet<K, N>& u) {
  return pow_jet(u, 0.5);
}

template <class K, std::size_t N>
TJet<K, N> inv_jet(const TJet<K, N>& u) {
  TJet<K, N> w;
  w.c[0] = K(1) / u.c[0];
  for (std::size_t k = 1; k < N; ++k) {
    K acc{};
    for (std::size_t j = 1; j <= k; ++j) acc = acc + u.c[j] * w.c[k - j];
    w.c[k] = -acc / u.c[0];
  }
  return w;
}

template <class K, std::size_t N>
TJet<K, N> operator/(const TJet<K, N>& a, const TJet<K, N>& b) {
  return a * inv_jet(b);
}

}  // namespace scurv
