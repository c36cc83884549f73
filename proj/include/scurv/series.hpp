#pragma once

// Exact truncated power series in s over Q, with two extra layers:
//   - coefficients may be polynomials in B (the squared norm treated as an
//     indeterminate, so "vanishes for every b" becomes coefficientwise zero)
//   - coefficients may carry the six solve unknowns (k, c, eps, nu, lam,
//     delta) linearly; products of two unknown-carrying values are rejected,
//     which pins the linearity the solves rely on.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "scurv/errors.hpp"

namespace scurv {

using Rat = boost::multiprecision::cpp_rational;

// dense polynomial in B, normalized: no trailing zeros, empty == 0
using PolyB = std::vector<Rat>;

void poly_trim(PolyB& p);
bool poly_is_zero(const PolyB& p);
PolyB poly_add(const PolyB& a, const PolyB& b);
PolyB poly_sub(const PolyB& a, const PolyB& b);
PolyB poly_mul(const PolyB& a, const PolyB& b);
PolyB poly_scal(const PolyB& a, const Rat& c);
Rat poly_eval(const PolyB& a, const Rat& B);
std::string poly_to_string(const PolyB& a);

enum SymId : int { sym_k = 0, sym_c = 1, sym_eps = 2, sym_nu = 3, sym_lam = 4, sym_delta = 5 };
constexpr int kSymCount = 6;

// constant part plus one PolyB per unknown (degree <= 1 in the unknowns)
struct LinSym {
    PolyB cpart;
    std::array<PolyB, kSymCount> sym;

    static LinSym from_rat(const Rat& r);
    static LinSym from_poly(PolyB p);
    static LinSym from_symbol(int id, PolyB coeff = PolyB{Rat(1)});

    bool is_const() const;
    bool is_zero() const;
};

LinSym operator+(const LinSym& a, const LinSym& b);
LinSym operator-(const LinSym& a, const LinSym& b);
LinSym operator-(const LinSym& a);
LinSym operator*(const LinSym& a, const LinSym& b);  // SymbolDegreeError if both carry symbols

struct SeriesS {
    int N = 0;                  // truncation: coefficients for s^0 .. s^N
    std::vector<LinSym> coef;   // size N+1
    bool exact = true;          // false once an irrational parameter was approximated
    double tol = 0.0;           // residual threshold honored instead of exact zero

    static SeriesS zero(int N);
    static SeriesS constant(const Rat& r, int N);
    static SeriesS variable(int N);  // the series "s"
    static SeriesS from_coeffs(const std::vector<Rat>& a, int N);

    bool is_numeric() const;  // every coefficient symbol-free
};

SeriesS s_add(const SeriesS& a, const SeriesS& b);
SeriesS s_sub(const SeriesS& a, const SeriesS& b);
SeriesS s_mul(const SeriesS& a, const SeriesS& b);
SeriesS s_div(const SeriesS& a, const SeriesS& b);  // needs an invertible rational constant term
SeriesS s_sqrt(const SeriesS& a);                   // needs constant term exactly 1
SeriesS s_scal(const SeriesS& a, const LinSym& c);
SeriesS s_scal(const SeriesS& a, const Rat& c);
SeriesS s_derive(const SeriesS& a);     // order drops to N-1
SeriesS s_integrate(const SeriesS& a);  // order rises to N+1, constant 0
SeriesS s_trunc(const SeriesS& a, int M);
SeriesS s_shift(const SeriesS& a);  // multiply by s at fixed truncation

enum class SeriesOpKind { Add, Mul, Div, Sqrt, Derive, Integrate, Scalar };
SeriesS series_op(SeriesOpKind kind, const std::vector<SeriesS>& args, const Rat& scalar = Rat(0));

enum class SolveStatus { UniqueTrivial, UniqueNontrivial, Underdetermined };

struct RatFn {
    PolyB num{};
    PolyB den{Rat(1)};
};
RatFn ratfn_normalize(RatFn f);
bool ratfn_equal(const RatFn& a, const RatFn& b);  // cross-multiplied polynomial identity
Rat ratfn_eval(const RatFn& f, const Rat& B);
std::string ratfn_to_string(const RatFn& f);

struct LinearSolveResult {
    SolveStatus status = SolveStatus::Underdetermined;
    std::vector<std::string> names;   // unknowns in solve order
    std::vector<RatFn> values;        // one per unknown when the solution is unique
    std::vector<PolyB> residuals;     // back-substitution residual per extracted coefficient
};

SeriesS phi_series_class_iv(const Rat& k1, const Rat& k2, int sign, int n_dim, int N);

LinearSolveResult gamma18_solve(const SeriesS& phi, int n_dim, int orders_used = 5);
LinearSolveResult gamma20_solve(const SeriesS& phi, int n_dim, int orders_used = 5);

struct OdeResiduals {
    SeriesS f0, f2, f4;
};
OdeResiduals ode_residuals_f024(const SeriesS& phi, const Rat& a1, const Rat& a2, int N);

struct FbCheck {
    std::vector<Rat> f_series;       // expansion of the averaged-volume factor in b
    std::vector<Rat> target_series;  // binomial series of sqrt(1 + (2 a2 - 3 a1^2) b^2)
    bool equal = false;
    double tol = 0.0;
};
FbCheck fb_series_check(const SeriesS& phi, int n_dim, int M);

// exact square root test for rationals; nullopt when not a perfect square
std::optional<Rat> rational_sqrt(const Rat& q);

}  // namespace scurv
