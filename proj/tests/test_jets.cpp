#include <cmath>
#include <random>

#include "doctest.h"
#include "scurv/jets.hpp"

using namespace scurv;

namespace {

// smooth test function with nontrivial mixed partials
template <class J>
J probe(const J& x, const J& y) {
    return exp(x * y) + sqrt(x * x + y * y + 1.0) * log(2.0 + x) + x * x * y;
}

double probe_d(double x, double y) {
    return std::exp(x * y) + std::sqrt(x * x + y * y + 1.0) * std::log(2.0 + x) + x * x * y;
}

}  // namespace

TEST_CASE("dual derivative matches finite differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int it = 0; it < 30; ++it) {
        double x = u(rng), y = u(rng);
        Dual<double> r = probe(Dual<double>(x, 1.0), Dual<double>(y, 0.0));
        double h = 1e-5;
        double fd = (probe_d(x + h, y) - probe_d(x - h, y)) / (2 * h);
        CHECK(r.d == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("jet gradient and hessian match finite differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    const double h = 1e-5;
    for (int it = 0; it < 20; ++it) {
        double x = u(rng), y = u(rng);
        using J = Jet2<double, 2>;
        J r = probe(J::variable(x, 0), J::variable(y, 1));

        auto f = [](double a, double b) { return probe_d(a, b); };
        CHECK(r.v == doctest::Approx(f(x, y)));
        CHECK(r.g[0] == doctest::Approx((f(x + h, y) - f(x - h, y)) / (2 * h)).epsilon(1e-6));
        CHECK(r.g[1] == doctest::Approx((f(x, y + h) - f(x, y - h)) / (2 * h)).epsilon(1e-6));
        double hxx = (f(x + h, y) - 2 * f(x, y) + f(x - h, y)) / (h * h);
        double hyy = (f(x, y + h) - 2 * f(x, y) + f(x, y - h)) / (h * h);
        double hxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) /
                     (4 * h * h);
        CHECK(r.h[0][0] == doctest::Approx(hxx).epsilon(1e-5));
        CHECK(r.h[1][1] == doctest::Approx(hyy).epsilon(1e-5));
        CHECK(r.h[0][1] == doctest::Approx(hxy).epsilon(1e-5));
        CHECK(r.h[0][1] == doctest::Approx(r.h[1][0]).epsilon(1e-14));
    }
}

TEST_CASE("dual-valued jet exposes third derivatives") {
    // f(x) = exp(2x): jet in x with scalar Dual tracking the same x gives f'''
    using S = Dual<double>;
    using J = Jet2<S, 1>;
    double x = 0.3;
    J j = J::variable(S(x, 1.0), 0);
    J r = exp(j * 2.0);
    // h[0][0] value is f'', its dual part is f'''
    double f3 = 8.0 * std::exp(2.0 * x);
    CHECK(r.h[0][0].d == doctest::Approx(f3).epsilon(1e-12));
}
