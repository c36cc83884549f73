#pragma once
#include <array>

#include "scurv/fields.hpp"
#include "scurv/linalg.hpp"

namespace scurv {

struct Christoffel {
    // gamma[i][j][k] = Gamma^i_{jk}, symmetric in (j, k)
    std::array<std::array<std::array<double, 2>, 2>, 2> gamma{};
};

struct RSData {
    double b2 = 0.0;
    Vec2 b_low{};   // b_i
    Vec2 b_up{};    // b^i = a^{ij} b_j
    Mat2 a{};       // a_ij at x
    Mat2 a_inv{};
    Mat2 nabla_b{};  // b_{i|j}
    Mat2 r{};        // symmetric part
    Mat2 s{};        // antisymmetric part
    Vec2 r_vec{};    // r_j = b^i r_ij
    Vec2 s_vec{};    // s_j = b^i s_ij
    Vec2 s_up{};     // s^i = a^{ik} s_k
};

Christoffel christoffel(const MetricSpec& spec, const Vec2& x);
RSData rs_decompose(const MetricSpec& spec, const Vec2& x);

}  // namespace scurv
