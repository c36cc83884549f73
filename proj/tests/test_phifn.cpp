#include <cmath>
#include <random>

#include "doctest.h"
#include "scurv/phifn.hpp"

using namespace scurv;

TEST_CASE("quartic-root family jet at the origin") {
    PhiModel m = PhiModel::class_iv(0.0, 4.0, +1);
    PhiJet j = phi_jet(m, 0.0);
    CHECK(j.phi == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(j.d1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(j.d2 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(j.d3 == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("equal-parameter family collapses to sqrt(1+k s^2)") {
    for (double k : {-1.0, 1.0, 4.0}) {
        PhiModel m = PhiModel::class_iv(k, k, +1);
        double smax = k < 0 ? 0.9 : 1.5;
        for (int i = 0; i <= 20; ++i) {
            double s = smax * (2.0 * i / 20.0 - 1.0);
            PhiJet j = phi_jet(m, s);
            double u = 1.0 + k * s * s;
            CHECK(j.phi == doctest::Approx(std::sqrt(u)).epsilon(1e-13));
            CHECK(j.d1 == doctest::Approx(k * s / std::sqrt(u)).epsilon(1e-12));
        }
    }
}

TEST_CASE("affine phi jet") {
    PhiModel m = PhiModel::excluded_family(1.0, 0.0, 1.0);
    PhiJet j = phi_jet(m, 0.3);
    CHECK(j.phi == doctest::Approx(1.3).epsilon(1e-15));
    CHECK(j.d1 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(j.d2 == doctest::Approx(0.0));
    CHECK(j.d3 == doctest::Approx(0.0));
}

TEST_CASE("square-root branch of the quartic family") {
    // k1=-1, k2=0, + branch collapses to sqrt(1+s)
    PhiModel m = PhiModel::class_iv(-1.0, 0.0, +1);
    for (double s : {-0.6, -0.2, 0.0, 0.35, 0.8}) {
        PhiJet j = phi_jet(m, s);
        CHECK(j.phi == doctest::Approx(std::sqrt(1.0 + s)).epsilon(1e-12));
        CHECK(j.d1 == doctest::Approx(0.5 / std::sqrt(1.0 + s)).epsilon(1e-11));
    }
}

TEST_CASE("jet derivatives agree with high-order finite differences") {
    std::vector<PhiModel> models = {
        PhiModel::class_iv(0.0, 4.0, +1),
        PhiModel::class_iv(1.25, 2.25, -1),
        PhiModel::excluded_family(1.0, 2.0, 0.3),
        PhiModel::series({1.0, 1.0, 1.5, 0.5}),
    };
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-0.55, 0.55);
    const double h = 0.01;
    for (const auto& m : models) {
        for (int it = 0; it < 50; ++it) {
            double s = u(rng);
            auto f = [&](double t) { return phi_jet(m, t).phi; };
            PhiJet j = phi_jet(m, s);
            double d1 = (-f(s + 2 * h) + 8 * f(s + h) - 8 * f(s - h) + f(s - 2 * h)) / (12 * h);
            double d2 = (-f(s + 2 * h) + 16 * f(s + h) - 30 * f(s) + 16 * f(s - h) - f(s - 2 * h)) /
                        (12 * h * h);
            double d3 = (f(s - 3 * h) - 8 * f(s - 2 * h) + 13 * f(s - h) - 13 * f(s + h) +
                         8 * f(s + 2 * h) - f(s + 3 * h)) /
                        (8 * h * h * h);
            CHECK(std::abs(j.d1 - d1) <= 1e-6 * (1.0 + std::abs(j.d1)));
            CHECK(std::abs(j.d2 - d2) <= 1e-6 * (1.0 + std::abs(j.d2)));
            CHECK(std::abs(j.d3 - d3) <= 2e-5 * (1.0 + std::abs(j.d3)));
        }
    }
}

TEST_CASE("pack values for the affine model") {
    PhiModel m = PhiModel::excluded_family(1.0, 0.0, 1.0);
    PhiPack p = q_pack(m, 0.0, 0.25);
    CHECK(p.Q == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.Delta == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.Psi == doctest::Approx(0.0));
    CHECK(p.Phi == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(p.Upsilon == doctest::Approx(-3.0).epsilon(1e-12));

    PhiPack q = q_pack(m, 0.5, 0.25);
    CHECK(q.Phi == doctest::Approx(-4.5).epsilon(1e-13));
}

TEST_CASE("pack internal consistency") {
    std::vector<PhiModel> models = {
        PhiModel::class_iv(0.0, 4.0, +1),
        PhiModel::class_iv(-1.0, 0.0, +1),
        PhiModel::excluded_family(1.0, 2.0, 0.3),
    };
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.7, 0.7);
    for (const auto& m : models) {
        for (int it = 0; it < 25; ++it) {
            double s = u(rng);
            double b2 = s * s + 0.1 + 0.5 * std::abs(u(rng));
            PhiPack p = q_pack(m, s, b2);
            double delta = 1.0 + s * p.Q + (b2 - s * s) * p.Qp;
            CHECK(p.Delta == doctest::Approx(delta).epsilon(1e-12));
            int n = 2;
            double phi = -(p.Q - s * p.Qp) * (n * p.Delta + s * p.Q + 1.0) -
                         (b2 - s * s) * (1.0 + s * p.Q) * p.Qpp;
            CHECK(p.Phi == doctest::Approx(phi).epsilon(1e-12));
        }
    }
}

TEST_CASE("pack Upsilon matches finite differences of the assembled expression") {
    PhiModel m = PhiModel::class_iv(0.0, 4.0, +1);
    double b2 = 0.49;
    auto expr = [&](double s) {
        PhiPack p = q_pack(m, s, b2);
        return s * p.Phi / (p.Delta * p.Delta) - 2.0 * p.Psi * b2;
    };
    for (double s : {-0.5, -0.1, 0.2, 0.6}) {
        double h = 1e-5;
        double fd = (expr(s + h) - expr(s - h)) / (2 * h);
        CHECK(q_pack(m, s, b2).Upsilon == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("Phi vanishes identically for Riemannian-compatible phi") {
    for (double k2 : {-1.0, 1.0, 4.0}) {
        PhiModel ci = PhiModel::class_iv(k2, k2, +1);
        PhiModel ex = PhiModel::excluded_family(1.0, k2, 0.0);
        double smax = k2 < 0 ? 0.85 : 1.2;
        double b2 = smax * smax;
        for (int i = 0; i <= 100; ++i) {
            double s = smax * (2.0 * i / 100.0 - 1.0);
            CHECK(std::abs(q_pack(ci, s, b2).Phi) <= 1e-12);
            CHECK(std::abs(q_pack(ex, s, b2).Phi) <= 1e-12);
        }
    }
    // affine phi must not be Riemannian-flat in this sense
    PhiModel R = PhiModel::excluded_family(1.0, 0.0, 1.0);
    CHECK(std::abs(q_pack(R, 0.0, 0.25).Phi) > 1.0);
}

TEST_CASE("volume factor quadrature") {
    PhiModel one = PhiModel::series({1.0}, 10.0);
    CHECK(f_of_b(one, 2, 0.4) == doctest::Approx(1.0).epsilon(1e-13));

    PhiModel randers = PhiModel::excluded_family(1.0, 0.0, 1.0);
    CHECK(f_of_b(randers, 2, 0.5) == doctest::Approx(0.6495190528383290).epsilon(1e-10));
    for (int i = 1; i <= 8; ++i) {
        double b = 0.1 * i;
        double want = std::pow(1.0 - b * b, 1.5);
        CHECK(f_of_b(randers, 2, b) == doctest::Approx(want).epsilon(1e-8));
    }

    PhiModel c04 = PhiModel::class_iv(0.0, 4.0, +1);
    CHECK(f_of_b(c04, 2, 0.6) == doctest::Approx(1.0).epsilon(1e-10));
    struct Pick {
        double k1, k2;
    };
    for (Pick pk : {Pick{0.0, 4.0}, Pick{-1.0, 0.0}, Pick{1.0, 2.0}}) {
        PhiModel m = PhiModel::class_iv(pk.k1, pk.k2, +1);
        for (int i = 1; i <= 8; ++i) {
            double b = 0.1 * i;
            if (!(b < m.b_o)) continue;
            double want = std::sqrt(1.0 + pk.k1 * b * b);
            CHECK(f_of_b(m, 2, b) == doctest::Approx(want).epsilon(1e-8));
        }
    }
}

TEST_CASE("volume factor derivative") {
    PhiModel c04 = PhiModel::class_iv(0.0, 4.0, +1);
    CHECK(std::abs(f_prime_of_b(c04, 2, 0.5)) <= 1e-7);

    PhiModel c12 = PhiModel::class_iv(1.0, 2.0, +1);
    double b = 0.5;
    double want = b / std::sqrt(1.0 + b * b);
    CHECK(f_prime_of_b(c12, 2, b) == doctest::Approx(want).epsilon(1e-6));

    PhiModel randers = PhiModel::excluded_family(1.0, 0.0, 1.0);
    double wantr = -3.0 * b * std::sqrt(1.0 - b * b);
    CHECK(f_prime_of_b(randers, 2, b) == doctest::Approx(wantr).epsilon(1e-6));
}

TEST_CASE("regularity margins") {
    PhiModel randers = PhiModel::excluded_family(1.0, 0.0, 1.0);
    CHECK(regularity_margin(randers, 0.5) == doctest::Approx(1.0).epsilon(1e-10));

    PhiModel one = PhiModel::series({1.0}, 10.0);
    CHECK(regularity_margin(one, 0.7) == doctest::Approx(1.0).epsilon(1e-12));

    PhiModel sq = PhiModel::class_iv(-1.0, 0.0, +1);
    CHECK(regularity_margin(sq, 1.0) <= 0.0);
    CHECK(regularity_margin(sq, 0.5) > 0.0);
}

TEST_CASE("domain and parameter errors") {
    CHECK_THROWS_AS(PhiModel::excluded_family(0.0, 1.0, 0.0), ParamError);
    CHECK_THROWS_AS(PhiModel::class_iv(2.0, 1.0, +1), ParamError);
    CHECK_THROWS_AS(PhiModel::class_iv(0.0, 4.0, 2), ParamError);

    PhiModel randers = PhiModel::excluded_family(1.0, 0.0, 1.0);  // b_o = 1
    CHECK_THROWS_AS(phi_jet(randers, 1.5), DomainError);
    CHECK_THROWS_AS(q_pack(randers, 0.5, 0.2), DomainError);  // s^2 > b^2

    PhiModel even = PhiModel::series({1.0, 0.0, 1.0}, 2.0);  // phi = 1 + s^2
    CHECK_THROWS_AS(q_pack(even, 1.0, 1.0), SingularPhiError);

    PhiModel steep = PhiModel::series({1.0, 2.0});  // Delta = 1 + 2s
    CHECK_THROWS_AS(q_pack(steep, -0.5, 0.25), SingularDeltaError);
}
