#include "scurv/riemann.hpp"

namespace scurv {

Christoffel christoffel(const MetricSpec& spec, const Vec2& x) {
    auto aj = spec.alpha_field(x);
    Mat2 a{{{aj[0][0].v, aj[0][1].v}, {aj[1][0].v, aj[1][1].v}}};
    if (!(det(a) > 0.0) || !(a[0][0] > 0.0))
        throw SingularMetricError("christoffel: a_ij not positive definite");
    Mat2 ainv = inverse(a);
    // da[l][j][k] = d_k a_lj
    double da[2][2][2];
    for (int l = 0; l < 2; ++l)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) da[l][j][k] = aj[l][j].g[k];

    Christoffel c;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                double acc = 0.0;
                for (int l = 0; l < 2; ++l)
                    acc += ainv[i][l] * (da[l][k][j] + da[l][j][k] - da[j][k][l]);
                c.gamma[i][j][k] = 0.5 * acc;
            }
    return c;
}

RSData rs_decompose(const MetricSpec& spec, const Vec2& x) {
    Christoffel c = christoffel(spec, x);
    auto aj = spec.alpha_field(x);
    auto bj = spec.beta_field(x);

    RSData d;
    d.a = {{{aj[0][0].v, aj[0][1].v}, {aj[1][0].v, aj[1][1].v}}};
    d.a_inv = inverse(d.a);
    d.b_low = {bj[0].v, bj[1].v};
    d.b_up = mul(d.a_inv, d.b_low);
    d.b2 = dot(d.b_up, d.b_low);

    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            double cov = bj[i].g[j];
            for (int k = 0; k < 2; ++k) cov -= c.gamma[k][i][j] * d.b_low[k];
            d.nabla_b[i][j] = cov;
        }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            d.r[i][j] = 0.5 * (d.nabla_b[i][j] + d.nabla_b[j][i]);
            d.s[i][j] = 0.5 * (d.nabla_b[i][j] - d.nabla_b[j][i]);
        }
    for (int j = 0; j < 2; ++j) {
        d.r_vec[j] = d.b_up[0] * d.r[0][j] + d.b_up[1] * d.r[1][j];
        d.s_vec[j] = d.b_up[0] * d.s[0][j] + d.b_up[1] * d.s[1][j];
    }
    d.s_up = mul(d.a_inv, d.s_vec);
    return d;
}

}  // namespace scurv
