#include <cmath>
#include <random>

#include "doctest.h"
#include "scurv/finsler.hpp"
#include "scurv/riemann.hpp"

using namespace scurv;

namespace {

std::vector<Vec2> disk_points(unsigned seed, int count, double radius = 0.9) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec2> out;
    for (int i = 0; i < count; ++i) {
        double r = radius * std::sqrt(u(rng));
        double th = 2.0 * M_PI * u(rng);
        out.push_back({r * std::cos(th), r * std::sin(th)});
    }
    return out;
}

Vec2 random_direction(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double th = 2.0 * M_PI * u(rng);
    double len = 0.25 + 1.5 * u(rng);
    return {len * std::cos(th), len * std::sin(th)};
}

MetricSpec euclidean_spec() {
    CatalogParams p;
    p.phi = PhiModel::series({1.0}, 1e6);
    return build_catalog_spec(CatalogId::FlatParallel, p);
}

}  // namespace

TEST_CASE("fundamental function on pinned inputs") {
    MetricSpec flat = build_catalog_spec(CatalogId::FlatParallel);
    CHECK(fundamental(flat, {0.3, -0.2}, {1.0, 0.0}).first == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(fundamental(flat, {0.0, 0.0}, {0.0, 1.0}).first == doctest::Approx(1.0).epsilon(1e-14));
    // alpha = 5, beta = 1.5, so F = 5 * (1 + 0.3)
    CHECK(fundamental(flat, {0.1, 0.1}, {3.0, 4.0}).first == doctest::Approx(6.5).epsilon(1e-14));

    MetricSpec e11 = build_catalog_spec(CatalogId::Example11);
    CHECK(fundamental(e11, {0.0, 0.0}, {1.0, 0.0}).first == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fundamental(e11, {0.0, 0.0}, {0.3, -0.4}).first == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fundamental tensor is symmetric and reproduces F^2 on the diagonal") {
    std::vector<MetricSpec> specs;
    specs.push_back(build_catalog_spec(CatalogId::Example11));
    {
        CatalogParams p;
        p.a1 = 0.5;
        p.a2 = 1.0;
        specs.push_back(build_catalog_spec(CatalogId::Example51, p));
    }
    specs.push_back(build_catalog_spec(CatalogId::RandersControl));
    specs.push_back(build_catalog_spec(CatalogId::ConformalGeneral));

    std::mt19937 rng(2024u);
    for (const auto& spec : specs) {
        for (const Vec2& x : disk_points(77u, 6)) {
            Vec2 y = random_direction(rng);
            auto [F, g] = fundamental(spec, x, y);
            CHECK(g[0][1] == doctest::Approx(g[1][0]).epsilon(1e-12));
            // Euler relation for a 1-homogeneous F: g_ij y^i y^j = F^2
            CHECK(inner(g, y, y) == doctest::Approx(F * F).epsilon(1e-11));
            CHECK(g[0][0] > 0.0);
            CHECK(det(g) > 0.0);
        }
    }
}

TEST_CASE("spray reduces to the geodesic coefficients of alpha when phi is constant") {
    MetricSpec spec = build_catalog_spec(CatalogId::Example11);
    spec.phi = PhiModel::series({1.0}, 1e6);

    for (const Vec2& x : {Vec2{0.5, 0.0}, Vec2{0.3, 0.2}, Vec2{-0.4, 0.35}}) {
        Christoffel ch = christoffel(spec, x);
        for (const Vec2& y : {Vec2{1.0, 1.0}, Vec2{0.6, -0.8}, Vec2{-0.3, 1.1}}) {
            SprayEval ev = spray(spec, x, y);
            for (int i = 0; i < 2; ++i) {
                double want = 0.0;
                for (int j = 0; j < 2; ++j)
                    for (int k = 0; k < 2; ++k) want += 0.5 * ch.gamma[i][j][k] * y[j] * y[k];
                CHECK(std::fabs(ev.G[i] - want) <= 1e-10 * (1.0 + std::fabs(want)));
            }
        }
    }

    SprayEval flat = spray(euclidean_spec(), {0.2, -0.6}, {1.0, 2.0});
    CHECK(flat.G[0] == doctest::Approx(0.0));
    CHECK(flat.G[1] == doctest::Approx(0.0));
}

TEST_CASE("fiber scaling: F degree 1, G degree 2, S degree 1") {
    std::vector<MetricSpec> specs;
    specs.push_back(build_catalog_spec(CatalogId::Example11));
    specs.push_back(build_catalog_spec(CatalogId::RandersControl));
    {
        CatalogParams p;
        p.a1 = 1.0;
        p.a2 = 1.5;
        specs.push_back(build_catalog_spec(CatalogId::Example51, p));
    }
    specs.push_back(build_catalog_spec(CatalogId::ConformalGeneral));

    std::mt19937 rng(555u);
    const double lam = 2.0;
    for (const auto& spec : specs) {
        for (const Vec2& x : disk_points(91u, 4)) {
            PointContext ctx = point_context(spec, x);
            for (int rep = 0; rep < 3; ++rep) {
                Vec2 y = random_direction(rng);
                Vec2 ly{lam * y[0], lam * y[1]};

                SprayEval a = spray(spec, x, y), b = spray(spec, x, ly);
                CHECK(std::fabs(b.F - lam * a.F) <= 1e-10 * (1.0 + std::fabs(a.F)));
                for (int i = 0; i < 2; ++i)
                    CHECK(std::fabs(b.G[i] - lam * lam * a.G[i]) <=
                          1e-10 * (1.0 + std::fabs(a.G[i])));

                double s1 = s_curvature_direct(spec, ctx, x, y);
                double s2 = s_curvature_direct(spec, ctx, x, ly);
                CHECK(std::fabs(s2 - lam * s1) <= 1e-10 * (1.0 + std::fabs(s1)));
            }
        }
    }
}

TEST_CASE("volume factor: closed form equals the unit-ball oracle") {
    // Euclidean everything: both routes give exactly 1
    CHECK(sigma_bh(euclidean_spec(), {0.4, -0.1}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sigma_bh_polar(euclidean_spec(), {0.4, -0.1}) == doctest::Approx(1.0).epsilon(1e-10));

    // flat Randers norm 1/2
    MetricSpec flat = build_catalog_spec(CatalogId::FlatParallel);
    CHECK(sigma_bh(flat, {0.0, 0.0}) == doctest::Approx(0.6495190528383290).epsilon(1e-10));
    CHECK(sigma_bh_polar(flat, {0.0, 0.0}) ==
          doctest::Approx(0.6495190528383290).epsilon(1e-8));

    MetricSpec e11 = build_catalog_spec(CatalogId::Example11);
    double prim = sigma_bh(e11, {0.5, 0.0});
    double orac = sigma_bh_polar(e11, {0.5, 0.0});
    CHECK(std::fabs(prim - orac) <= 1e-8 * std::fabs(prim));

    std::vector<MetricSpec> specs;
    specs.push_back(e11);
    {
        CatalogParams p;
        p.a1 = 1.0;
        p.a2 = 1.5;
        specs.push_back(build_catalog_spec(CatalogId::Example51, p));
    }
    specs.push_back(build_catalog_spec(CatalogId::RandersControl));
    specs.push_back(build_catalog_spec(CatalogId::ConformalConstB));
    specs.push_back(build_catalog_spec(CatalogId::ConformalGeneral));

    unsigned seed = 11u;
    for (const auto& spec : specs) {
        for (const Vec2& x : disk_points(seed++, 50)) {
            double a = sigma_bh(spec, x);
            double b = sigma_bh_polar(spec, x);
            CHECK(std::fabs(a - b) <= 1e-8 * std::fabs(a));
        }
    }
}

TEST_CASE("direct S-curvature vanishes on both isotropic constructions") {
    MetricSpec e11 = build_catalog_spec(CatalogId::Example11);
    // pinned smoke value
    CHECK(std::fabs(s_curvature_direct(e11, {0.5, 0.0}, {1.0, 1.0})) <= 1e-6);

    CatalogParams p51;
    p51.a1 = 0.5;
    p51.a2 = 1.0;
    MetricSpec e51 = build_catalog_spec(CatalogId::Example51, p51);

    const Vec2 xs[] = {{0.5, 0.0}, {0.3, 0.2}, {0.1, -0.4}};
    const Vec2 ys[] = {{1.0, 0.0}, {0.6, 0.8}, {-1.0, 0.5}};
    for (const auto& x : xs) {
        PointContext c11 = point_context(e11, x);
        PointContext c51 = point_context(e51, x);
        for (const auto& y : ys) {
            CHECK(std::fabs(s_curvature_direct(e11, c11, x, y)) <= 1e-10);
            CHECK(std::fabs(s_curvature_direct(e51, c51, x, y)) <= 1e-10);
        }
    }
}

TEST_CASE("density gradient matches finite differences of ln sigma") {
    std::vector<MetricSpec> specs;
    specs.push_back(build_catalog_spec(CatalogId::Example11));
    {
        CatalogParams p;
        p.a1 = 0.5;
        p.a2 = 1.0;
        specs.push_back(build_catalog_spec(CatalogId::Example51, p));
    }
    specs.push_back(build_catalog_spec(CatalogId::RandersControl));
    specs.push_back(build_catalog_spec(CatalogId::ConformalConstB));

    const double h = 1e-5;
    for (const auto& spec : specs) {
        for (const Vec2& x : {Vec2{0.4, 0.1}, Vec2{-0.3, 0.25}}) {
            Vec2 grad = grad_ln_sigma_bh(spec, x);
            for (int m = 0; m < 2; ++m) {
                Vec2 xp = x, xm = x;
                xp[m] += h;
                xm[m] -= h;
                double fd = (std::log(sigma_bh(spec, xp)) - std::log(sigma_bh(spec, xm))) /
                            (2.0 * h);
                CHECK(std::fabs(grad[m] - fd) <= 1e-6 * (1.0 + std::fabs(grad[m])));
            }
        }
    }
}

TEST_CASE("divergence route and closed-form route agree") {
    MetricSpec control = build_catalog_spec(CatalogId::RandersControl);
    std::mt19937 rng(4242u);
    for (const Vec2& x : disk_points(303u, 20)) {
        PointContext ctx = point_context(control, x);
        Vec2 y = random_direction(rng);
        double d = s_curvature_direct(control, ctx, x, y);
        double f = s_curvature_formula(control, ctx, x, y);
        CHECK(std::fabs(d - f) <= 1e-6 * (1.0 + std::fabs(d)));
    }

    std::vector<MetricSpec> more;
    more.push_back(build_catalog_spec(CatalogId::Example11));
    more.push_back(build_catalog_spec(CatalogId::ConformalGeneral));
    more.push_back(build_catalog_spec(CatalogId::FlatParallel));
    unsigned seed = 707u;
    for (const auto& spec : more) {
        for (const Vec2& x : disk_points(seed++, 10)) {
            RSData rs = rs_decompose(spec, x);
            if (rs.b2 <= 1e-6) continue;  // closed form is 1/b-weighted
            PointContext ctx = point_context(spec, x);
            Vec2 y = random_direction(rng);
            double d = s_curvature_direct(spec, ctx, x, y);
            double f = s_curvature_formula(spec, ctx, x, y);
            CHECK(std::fabs(d - f) <= 1e-6 * (1.0 + std::fabs(d)));
        }
    }
}

TEST_CASE("isotropy fit accepts the isotropic example and flags the perturbed control") {
    auto dirs = unit_directions(16);

    MetricSpec e11 = build_catalog_spec(CatalogId::Example11);
    auto [c_hat, resid] = isotropy_fit(e11, {0.5, 0.3}, dirs);
    CHECK(std::fabs(c_hat) <= 1e-8);
    CHECK(resid <= 1e-6);

    CatalogParams pp;
    pp.perturb = 0.05;
    MetricSpec bad = build_catalog_spec(CatalogId::Example11, pp);
    auto [c_bad, resid_bad] = isotropy_fit(bad, {0.5, 0.3}, dirs);
    (void)c_bad;
    CHECK(resid_bad > 1e-3);
    auto fit2 = isotropy_fit(bad, {0.7, 0.1}, dirs);
    CHECK(fit2.second > 1e-3);
}

TEST_CASE("finsler error paths") {
    MetricSpec e11 = build_catalog_spec(CatalogId::Example11);
    CHECK_THROWS_AS(fundamental(e11, {0.5, 0.0}, {0.0, 0.0}), NullVectorError);
    CHECK_THROWS_AS(s_curvature_formula(e11, {0.0, 0.0}, {1.0, 0.0}), BZeroError);

    // strong convexity fails for 1 + 3 s^2 once |s| is large enough
    CatalogParams pg;
    pg.beta_const = {0.9, 0.0};
    pg.phi = PhiModel::series({1.0, 0.0, 3.0}, 10.0);
    MetricSpec soft = build_catalog_spec(CatalogId::FlatParallel, pg);
    CHECK(fundamental(soft, {0.0, 0.0}, {1.0, 0.2}).first > 0.0);
    CHECK_THROWS_AS(spray(soft, {0.0, 0.0}, {1.0, 0.2}), SingularGError);

    // norm of beta beyond the model's b_o
    CatalogParams pr;
    pr.beta_const = {1.2, 0.0};
    MetricSpec wide = build_catalog_spec(CatalogId::FlatParallel, pr);
    CHECK_THROWS_AS(sigma_bh(wide, {0.0, 0.0}), RegularityError);

    CHECK_THROWS_AS(isotropy_fit(e11, {0.5, 0.0}, unit_directions(4)), ParamError);
    CHECK_THROWS_AS(unit_directions(0), ParamError);
}
