#include <cmath>
#include <random>

#include "doctest.h"
#include "scurv/fields.hpp"

using namespace scurv;

namespace {

double b_squared(const MetricSpec& spec, const Vec2& x) {
    auto aj = spec.alpha_field(x);
    auto bj = spec.beta_field(x);
    Mat2 a{{{aj[0][0].v, aj[0][1].v}, {aj[1][0].v, aj[1][1].v}}};
    Vec2 b{bj[0].v, bj[1].v};
    return inner(inverse(a), b, b);
}

}  // namespace

TEST_CASE("rotational catalog sigma jet") {
    auto spec = build_catalog_spec(CatalogId::Example11);
    REQUIRE(spec.has_triple);
    SJet s = eval_jet(spec.triple.sigma, {0.5, 0.0});
    CHECK(s.v == doctest::Approx(-0.25 * std::log(2.0)).epsilon(1e-14));
    CHECK(s.g[0] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(s.g[1] == doctest::Approx(0.0));
}

TEST_CASE("constant fields carry zero derivatives") {
    auto spec = build_catalog_spec(CatalogId::FlatParallel);
    auto bj = spec.beta_field({0.3, -0.7});
    CHECK(bj[0].v == doctest::Approx(0.5));
    CHECK(bj[1].v == doctest::Approx(0.0));
    for (int i = 0; i < 2; ++i) {
        CHECK(bj[0].g[i] == 0.0);
        CHECK(bj[1].g[i] == 0.0);
        for (int j = 0; j < 2; ++j) CHECK(bj[0].h[i][j] == 0.0);
    }
    auto aj = spec.alpha_field({0.3, -0.7});
    CHECK(aj[0][0].v == 1.0);
    CHECK(aj[0][1].v == 0.0);
}

TEST_CASE("general-coefficient sigma at the origin") {
    CatalogParams p;
    p.a1 = 1.0;
    p.a2 = 1.5;
    auto spec = build_catalog_spec(CatalogId::Example51, p);
    SJet s = eval_jet(spec.triple.sigma, {0.0, 0.0});
    CHECK(s.v == doctest::Approx(0.0));
    CHECK(s.g[0] == doctest::Approx(0.0));
    CHECK(s.g[1] == doctest::Approx(0.0));
}

TEST_CASE("beta norm equals |x| on the rotational constructions") {
    CatalogParams p51;
    p51.a1 = 1.0;
    p51.a2 = 1.5;
    std::vector<MetricSpec> specs = {build_catalog_spec(CatalogId::Example11),
                                     build_catalog_spec(CatalogId::Example51, p51)};
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-0.63, 0.63);
    for (const auto& spec : specs) {
        for (int it = 0; it < 100; ++it) {
            Vec2 x{u(rng), u(rng)};
            double r2 = x[0] * x[0] + x[1] * x[1];
            CHECK(std::abs(b_squared(spec, x) - r2) <= 1e-12);
        }
    }
}

TEST_CASE("const-b construction has constant beta norm") {
    CatalogParams p;
    p.b0 = 0.37;
    auto spec = build_catalog_spec(CatalogId::ConformalConstB, p);
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(-0.9, 0.9);
    for (int it = 0; it < 100; ++it) {
        Vec2 x{u(rng), u(rng)};
        CHECK(std::abs(std::sqrt(b_squared(spec, x)) - 0.37) <= 1e-12);
    }
}

TEST_CASE("field jets agree with central differences") {
    CatalogParams p51;
    p51.a1 = 0.5;
    p51.a2 = 1.0;
    std::vector<MetricSpec> specs = {
        build_catalog_spec(CatalogId::Example11),
        build_catalog_spec(CatalogId::Example51, p51),
        build_catalog_spec(CatalogId::ConformalGeneral),
        build_catalog_spec(CatalogId::ConformalConstB),
        build_catalog_spec(CatalogId::RandersControl),
    };
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    const double h = 1e-5;
    for (const auto& spec : specs) {
        for (int it = 0; it < 12; ++it) {
            Vec2 x{u(rng), u(rng)};
            for (int comp = 0; comp < 4; ++comp) {
                auto value = [&](const Vec2& q) {
                    if (comp < 2) return spec.beta_field(q)[comp].v;
                    auto aj = spec.alpha_field(q);
                    return comp == 2 ? aj[0][0].v : aj[1][1].v;
                };
                auto jet = [&](const Vec2& q) {
                    if (comp < 2) return spec.beta_field(q)[comp];
                    auto aj = spec.alpha_field(q);
                    return comp == 2 ? aj[0][0] : aj[1][1];
                };
                SJet j = jet(x);
                for (int d = 0; d < 2; ++d) {
                    Vec2 xp = x, xm = x;
                    xp[d] += h;
                    xm[d] -= h;
                    double fd = (value(xp) - value(xm)) / (2 * h);
                    CHECK(std::abs(j.g[d] - fd) <= 1e-6 * (1.0 + std::abs(j.g[d])));
                }
                // hessian diagonal via second difference
                for (int d = 0; d < 2; ++d) {
                    Vec2 xp = x, xm = x;
                    xp[d] += h;
                    xm[d] -= h;
                    double fd = (value(xp) - 2 * value(x) + value(xm)) / (h * h);
                    CHECK(std::abs(j.h[d][d] - fd) <= 1e-4 * (1.0 + std::abs(j.h[d][d])));
                }
                CHECK(j.h[0][1] == doctest::Approx(j.h[1][0]).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("catalog parameter validation") {
    CatalogParams bad51;
    bad51.a1 = 0.0;
    bad51.a2 = 1.0;  // k2 == k1
    CHECK_THROWS_AS(build_catalog_spec(CatalogId::Example51, bad51), ParamError);

    CatalogParams zerofields;
    zerofields.fields = FieldTriple{
        [](const Vec2&) { return SJet::constant(0.1); },
        [](const Vec2&) { return SJet::constant(0.0); },
        [](const Vec2&) { return SJet::constant(0.0); },
    };
    CHECK_THROWS_AS(build_catalog_spec(CatalogId::ConformalGeneral, zerofields), ParamError);

    CatalogParams badb0;
    badb0.b0 = 0.0;
    CHECK_THROWS_AS(build_catalog_spec(CatalogId::ConformalConstB, badb0), ParamError);

    CHECK_THROWS_AS(catalog_triple(CatalogId::FlatParallel, {}), ParamError);
}

TEST_CASE("domain guard on the general-coefficient logs") {
    CatalogParams p;
    p.a1 = 1.0;
    p.a2 = 0.5;  // k1 = -2: log argument 1 - 2|x|^2
    auto spec = build_catalog_spec(CatalogId::Example51, p);
    CHECK_NOTHROW(spec.alpha_field({0.1, 0.1}));
    CHECK_THROWS_AS(spec.alpha_field({0.8, 0.0}), DomainError);
}
