#include "scurv/series.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace scurv {

namespace {

using BigInt = boost::multiprecision::cpp_int;
// 200-bit binary float used only to approximate an irrational a1
using BigF = boost::multiprecision::number<
    boost::multiprecision::backends::cpp_bin_float<200, boost::multiprecision::backends::digit_base_2>>;

double rat_mag(const Rat& r) { return std::fabs(r.convert_to<double>()); }

}  // namespace

void poly_trim(PolyB& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

bool poly_is_zero(const PolyB& p) {
    for (const Rat& c : p)
        if (c != 0) return false;
    return true;
}

PolyB poly_add(const PolyB& a, const PolyB& b) {
    PolyB r(std::max(a.size(), b.size()), Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
    poly_trim(r);
    return r;
}

PolyB poly_sub(const PolyB& a, const PolyB& b) {
    PolyB r(std::max(a.size(), b.size()), Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    poly_trim(r);
    return r;
}

PolyB poly_mul(const PolyB& a, const PolyB& b) {
    if (a.empty() || b.empty()) return {};
    PolyB r(a.size() + b.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    poly_trim(r);
    return r;
}

PolyB poly_scal(const PolyB& a, const Rat& c) {
    if (c == 0) return {};
    PolyB r = a;
    for (Rat& x : r) x *= c;
    return r;
}

Rat poly_eval(const PolyB& a, const Rat& B) {
    Rat acc(0);
    for (std::size_t i = a.size(); i-- > 0;) acc = acc * B + a[i];
    return acc;
}

std::string poly_to_string(const PolyB& a) {
    if (poly_is_zero(a)) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        Rat c = a[i];
        if (first) {
            if (c < 0) {
                os << "-";
                c = -c;
            }
        } else {
            os << (c < 0 ? " - " : " + ");
            if (c < 0) c = -c;
        }
        bool unit = (c == 1) && i > 0;
        if (!unit) os << c.str();
        if (i > 0) {
            if (!unit) os << "*";
            os << "B";
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    return os.str();
}

namespace {

// long division over Q[B]; remainder returned, quotient optional
PolyB poly_divmod(PolyB a, const PolyB& b, PolyB* quot) {
    if (poly_is_zero(b)) throw DegenerateSystemError("polynomial division by zero");
    PolyB q;
    if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, Rat(0));
    while (a.size() >= b.size() && !poly_is_zero(a)) {
        std::size_t sh = a.size() - b.size();
        Rat f = a.back() / b.back();
        q[sh] = f;
        for (std::size_t i = 0; i < b.size(); ++i) a[sh + i] -= f * b[i];
        poly_trim(a);
    }
    if (quot) {
        poly_trim(q);
        *quot = q;
    }
    return a;
}

PolyB poly_monic(PolyB p) {
    poly_trim(p);
    if (p.empty()) return p;
    Rat lead = p.back();
    for (Rat& c : p) c /= lead;
    return p;
}

PolyB poly_gcd(PolyB a, PolyB b) {
    poly_trim(a);
    poly_trim(b);
    while (!poly_is_zero(b)) {
        PolyB r = poly_divmod(a, b, nullptr);
        a = std::move(b);
        b = poly_monic(std::move(r));
    }
    return poly_monic(std::move(a));
}

}  // namespace

LinSym LinSym::from_rat(const Rat& r) {
    LinSym x;
    if (r != 0) x.cpart = {r};
    return x;
}

LinSym LinSym::from_poly(PolyB p) {
    LinSym x;
    poly_trim(p);
    x.cpart = std::move(p);
    return x;
}

LinSym LinSym::from_symbol(int id, PolyB coeff) {
    LinSym x;
    poly_trim(coeff);
    x.sym[std::size_t(id)] = std::move(coeff);
    return x;
}

bool LinSym::is_const() const {
    for (const PolyB& p : sym)
        if (!poly_is_zero(p)) return false;
    return true;
}

bool LinSym::is_zero() const { return poly_is_zero(cpart) && is_const(); }

LinSym operator+(const LinSym& a, const LinSym& b) {
    LinSym r;
    r.cpart = poly_add(a.cpart, b.cpart);
    for (int j = 0; j < kSymCount; ++j) r.sym[j] = poly_add(a.sym[j], b.sym[j]);
    return r;
}

LinSym operator-(const LinSym& a, const LinSym& b) {
    LinSym r;
    r.cpart = poly_sub(a.cpart, b.cpart);
    for (int j = 0; j < kSymCount; ++j) r.sym[j] = poly_sub(a.sym[j], b.sym[j]);
    return r;
}

LinSym operator-(const LinSym& a) {
    LinSym r;
    r.cpart = poly_scal(a.cpart, Rat(-1));
    for (int j = 0; j < kSymCount; ++j) r.sym[j] = poly_scal(a.sym[j], Rat(-1));
    return r;
}

LinSym operator*(const LinSym& a, const LinSym& b) {
    if (!a.is_const() && !b.is_const())
        throw SymbolDegreeError("product of two unknown-carrying coefficients");
    const LinSym& s = a.is_const() ? b : a;
    const PolyB& c = a.is_const() ? a.cpart : b.cpart;
    LinSym r;
    r.cpart = poly_mul(s.cpart, c);
    for (int j = 0; j < kSymCount; ++j) r.sym[j] = poly_mul(s.sym[j], c);
    return r;
}

SeriesS SeriesS::zero(int N) {
    if (N < 0) throw OrderError("negative truncation order");
    SeriesS r;
    r.N = N;
    r.coef.assign(std::size_t(N) + 1, LinSym{});
    return r;
}

SeriesS SeriesS::constant(const Rat& v, int N) {
    SeriesS r = zero(N);
    r.coef[0] = LinSym::from_rat(v);
    return r;
}

SeriesS SeriesS::variable(int N) {
    SeriesS r = zero(N);
    if (N < 1) throw OrderError("order too small for the variable itself");
    r.coef[1] = LinSym::from_rat(Rat(1));
    return r;
}

SeriesS SeriesS::from_coeffs(const std::vector<Rat>& a, int N) {
    SeriesS r = zero(N);
    for (std::size_t i = 0; i < a.size() && i <= std::size_t(N); ++i)
        r.coef[i] = LinSym::from_rat(a[i]);
    return r;
}

bool SeriesS::is_numeric() const {
    for (const LinSym& c : coef)
        if (!c.is_const()) return false;
    return true;
}

namespace {

void check_orders(const SeriesS& a, const SeriesS& b) {
    if (a.N != b.N) throw OrderError("mismatched truncation orders");
}

void merge_flags(SeriesS& r, const SeriesS& a) {
    r.exact = r.exact && a.exact;
    r.tol = std::max(r.tol, a.tol);
}
void merge_flags(SeriesS& r, const SeriesS& a, const SeriesS& b) {
    r.exact = a.exact && b.exact;
    r.tol = std::max(a.tol, b.tol);
}

}  // namespace

SeriesS s_add(const SeriesS& a, const SeriesS& b) {
    check_orders(a, b);
    SeriesS r = SeriesS::zero(a.N);
    for (int i = 0; i <= a.N; ++i) r.coef[i] = a.coef[i] + b.coef[i];
    merge_flags(r, a, b);
    return r;
}

SeriesS s_sub(const SeriesS& a, const SeriesS& b) {
    check_orders(a, b);
    SeriesS r = SeriesS::zero(a.N);
    for (int i = 0; i <= a.N; ++i) r.coef[i] = a.coef[i] - b.coef[i];
    merge_flags(r, a, b);
    return r;
}

SeriesS s_mul(const SeriesS& a, const SeriesS& b) {
    check_orders(a, b);
    SeriesS r = SeriesS::zero(a.N);
    for (int i = 0; i <= a.N; ++i)
        for (int j = 0; i + j <= a.N; ++j) r.coef[i + j] = r.coef[i + j] + a.coef[i] * b.coef[j];
    merge_flags(r, a, b);
    return r;
}

SeriesS s_div(const SeriesS& a, const SeriesS& b) {
    check_orders(a, b);
    const LinSym& b0 = b.coef[0];
    if (!b0.is_const() || b0.cpart.size() != 1)
        throw NonInvertibleError("divisor needs a nonzero rational constant term");
    Rat inv0 = Rat(1) / b0.cpart[0];
    SeriesS q = SeriesS::zero(a.N);
    for (int k = 0; k <= a.N; ++k) {
        LinSym acc = a.coef[k];
        for (int j = 1; j <= k; ++j) acc = acc - b.coef[j] * q.coef[k - j];
        q.coef[k] = acc * LinSym::from_rat(inv0);
    }
    merge_flags(q, a, b);
    return q;
}

SeriesS s_sqrt(const SeriesS& a) {
    const LinSym& a0 = a.coef[0];
    if (!a0.is_const() || a0.cpart.size() != 1 || a0.cpart[0] != 1)
        throw NonInvertibleError("square root needs constant term exactly 1");
    SeriesS r = SeriesS::zero(a.N);
    r.coef[0] = LinSym::from_rat(Rat(1));
    for (int k = 1; k <= a.N; ++k) {
        LinSym acc = a.coef[k];
        for (int i = 1; i < k; ++i) acc = acc - r.coef[i] * r.coef[k - i];
        r.coef[k] = acc * LinSym::from_rat(Rat(1, 2));
    }
    merge_flags(r, a);
    return r;
}

SeriesS s_scal(const SeriesS& a, const LinSym& c) {
    SeriesS r = SeriesS::zero(a.N);
    for (int i = 0; i <= a.N; ++i) r.coef[i] = a.coef[i] * c;
    merge_flags(r, a);
    return r;
}

SeriesS s_scal(const SeriesS& a, const Rat& c) { return s_scal(a, LinSym::from_rat(c)); }

SeriesS s_derive(const SeriesS& a) {
    if (a.N < 1) throw OrderError("cannot differentiate an order-0 truncation");
    SeriesS r = SeriesS::zero(a.N - 1);
    for (int i = 1; i <= a.N; ++i) r.coef[i - 1] = a.coef[i] * LinSym::from_rat(Rat(i));
    merge_flags(r, a);
    return r;
}

SeriesS s_integrate(const SeriesS& a) {
    SeriesS r = SeriesS::zero(a.N + 1);
    for (int i = 0; i <= a.N; ++i) r.coef[i + 1] = a.coef[i] * LinSym::from_rat(Rat(1, i + 1));
    merge_flags(r, a);
    return r;
}

SeriesS s_trunc(const SeriesS& a, int M) {
    if (M > a.N) throw OrderError("cannot extend a truncation");
    SeriesS r = SeriesS::zero(M);
    for (int i = 0; i <= M; ++i) r.coef[i] = a.coef[i];
    merge_flags(r, a);
    return r;
}

SeriesS s_shift(const SeriesS& a) {
    SeriesS r = SeriesS::zero(a.N);
    for (int i = 1; i <= a.N; ++i) r.coef[i] = a.coef[i - 1];
    merge_flags(r, a);
    return r;
}

SeriesS series_op(SeriesOpKind kind, const std::vector<SeriesS>& args, const Rat& scalar) {
    auto need = [&](std::size_t n) {
        if (args.size() != n) throw ParamError("series_op: wrong argument count");
    };
    switch (kind) {
        case SeriesOpKind::Add: need(2); return s_add(args[0], args[1]);
        case SeriesOpKind::Mul: need(2); return s_mul(args[0], args[1]);
        case SeriesOpKind::Div: need(2); return s_div(args[0], args[1]);
        case SeriesOpKind::Sqrt: need(1); return s_sqrt(args[0]);
        case SeriesOpKind::Derive: need(1); return s_derive(args[0]);
        case SeriesOpKind::Integrate: need(1); return s_integrate(args[0]);
        case SeriesOpKind::Scalar: need(1); return s_scal(args[0], scalar);
    }
    throw ParamError("series_op: unknown kind");
}

RatFn ratfn_normalize(RatFn f) {
    poly_trim(f.num);
    poly_trim(f.den);
    if (poly_is_zero(f.den)) throw DegenerateSystemError("rational function with zero denominator");
    if (poly_is_zero(f.num)) return {PolyB{}, PolyB{Rat(1)}};
    PolyB g = poly_gcd(f.num, f.den);
    if (!(g.size() == 1 && g[0] == 1)) {
        PolyB qn, qd;
        poly_divmod(f.num, g, &qn);
        poly_divmod(f.den, g, &qd);
        f.num = qn;
        f.den = qd;
    }
    Rat scale = (f.den[0] != 0) ? f.den[0] : f.den.back();
    f.num = poly_scal(f.num, Rat(1) / scale);
    f.den = poly_scal(f.den, Rat(1) / scale);
    return f;
}

bool ratfn_equal(const RatFn& a, const RatFn& b) {
    return poly_is_zero(poly_sub(poly_mul(a.num, b.den), poly_mul(b.num, a.den)));
}

Rat ratfn_eval(const RatFn& f, const Rat& B) {
    Rat d = poly_eval(f.den, B);
    if (d == 0) throw DegenerateSystemError("rational function pole at requested B");
    return poly_eval(f.num, B) / d;
}

std::string ratfn_to_string(const RatFn& f) {
    if (f.den.size() == 1 && f.den[0] == 1) return poly_to_string(f.num);
    return "(" + poly_to_string(f.num) + ") / (" + poly_to_string(f.den) + ")";
}

std::optional<Rat> rational_sqrt(const Rat& q) {
    if (q < 0) return std::nullopt;
    if (q == 0) return Rat(0);
    BigInt num = boost::multiprecision::numerator(q);
    BigInt den = boost::multiprecision::denominator(q);
    BigInt rn = boost::multiprecision::sqrt(num);
    BigInt rd = boost::multiprecision::sqrt(den);
    if (rn * rn != num || rd * rd != den) return std::nullopt;
    return Rat(rn, rd);
}

namespace {

// nearest 200-bit dyadic rational to sqrt(q); exact pipeline continues on it
Rat approx_sqrt(const Rat& q) {
    BigF x = sqrt(BigF(boost::multiprecision::numerator(q)) /
                  BigF(boost::multiprecision::denominator(q)));
    int e = 0;
    BigF m = frexp(x, &e);
    m = ldexp(m, 210);
    e -= 210;
    BigInt mi = m.convert_to<BigInt>();
    if (e >= 0) return Rat(mi << e);
    return Rat(mi, BigInt(1) << -e);
}

}  // namespace

SeriesS phi_series_class_iv(const Rat& k1, const Rat& k2, int sign, int n_dim, int N) {
    if (k2 < k1) throw ParamError("phi_series_class_iv: needs k2 >= k1");
    if (sign != 1 && sign != -1) throw ParamError("phi_series_class_iv: sign must be +1 or -1");
    if (n_dim != 2) throw DimensionError("phi_series_class_iv: only n = 2 is supported");
    if (N < 0) throw OrderError("negative truncation order");

    bool exact = true;
    Rat q;  // sign * sqrt(k2 - k1) / 2, which is also the linear coefficient
    if (auto root = rational_sqrt(k2 - k1)) {
        q = Rat(sign) * (*root) / 2;
    } else {
        q = Rat(sign) * approx_sqrt(k2 - k1) / 2;
        exact = false;
    }

    // phi' = phi * (u'/(4u) + tau),  u = (1+k1 s^2)(1+k2 s^2),
    // tau = q / ((1+k1 s^2) sqrt(1+k2 s^2))
    int W = std::max(N, 1);
    SeriesS u1 = SeriesS::from_coeffs({Rat(1), Rat(0), k1}, W);
    SeriesS u2 = SeriesS::from_coeffs({Rat(1), Rat(0), k2}, W);
    SeriesS u = s_mul(u1, u2);
    SeriesS up = SeriesS::from_coeffs({Rat(0), 2 * (k1 + k2), Rat(0), 4 * k1 * k2}, W);
    SeriesS tau = s_div(SeriesS::constant(q, W), s_mul(u1, s_sqrt(u2)));
    SeriesS psi = s_add(s_div(s_scal(up, Rat(1, 4)), u), tau);

    SeriesS phi = SeriesS::zero(N);
    std::vector<Rat> a(std::size_t(N) + 1, Rat(0));
    a[0] = 1;
    for (int i = 0; i < N; ++i) {
        Rat acc(0);
        for (int j = 0; j <= i; ++j) {
            const PolyB& pc = psi.coef[i - j].cpart;
            if (!pc.empty()) acc += a[j] * pc[0];
        }
        a[i + 1] = acc / (i + 1);
    }
    for (int i = 0; i <= N; ++i) phi.coef[i] = LinSym::from_rat(a[i]);
    phi.exact = exact;
    phi.tol = exact ? 0.0 : 1e-30;
    return phi;
}

namespace {

struct GammaParts {
    SeriesS phi, p1, p2, p3, w, D, E;
    int W = 0;
};

// shared skeleton: w = phi - s phi'; D is the cleared Delta; E the cleared
// (sign-flipped, scaled) Phi so that Phi = -phi E / w^4
GammaParts gamma_parts(const SeriesS& phi_in, int n_dim, int orders_used) {
    if (!phi_in.is_numeric()) throw ParamError("solver input series must be numeric");
    if (phi_in.coef.empty() || !(phi_in.coef[0].cpart.size() == 1 && phi_in.coef[0].cpart[0] == 1))
        throw ParamError("solver input series must have constant term 1");
    if (phi_in.N < orders_used + 4) throw OrderError("working order too small for the solve");
    if (n_dim < 2) throw DimensionError("solver needs n >= 2");

    GammaParts g;
    g.W = phi_in.N - 3;
    int W = g.W;
    g.phi = s_trunc(phi_in, W);
    g.p1 = s_trunc(s_derive(phi_in), W);
    g.p2 = s_trunc(s_derive(s_derive(phi_in)), W);
    g.p3 = s_trunc(s_derive(s_derive(s_derive(phi_in))), W);
    g.w = s_sub(g.phi, s_shift(g.p1));

    PolyB Bpoly{Rat(0), Rat(1)};
    auto times_B_minus_s2 = [&](const SeriesS& x) {
        return s_sub(s_scal(x, LinSym::from_poly(Bpoly)), s_shift(s_shift(x)));
    };

    g.D = s_add(g.w, times_B_minus_s2(g.p2));

    SeriesS nD_plus_w = s_add(s_scal(g.D, Rat(n_dim)), g.w);
    SeriesS first = s_mul(s_sub(s_mul(g.p1, g.w), s_shift(s_mul(g.phi, g.p2))), nD_plus_w);
    SeriesS inner = s_add(s_mul(s_add(s_mul(g.p1, g.p2), s_mul(g.phi, g.p3)), g.w),
                          s_scal(s_shift(s_mul(g.phi, s_mul(g.p2, g.p2))), Rat(2)));
    g.E = s_add(first, times_B_minus_s2(inner));
    return g;
}

struct ExtractedRows {
    // per extracted s-coefficient: constant part and per-symbol PolyB row
    std::vector<PolyB> cpart;
    std::vector<std::array<PolyB, kSymCount>> rows;
};

ExtractedRows extract(const SeriesS& gamma, int orders_used) {
    ExtractedRows ex;
    for (int i = 0; i <= orders_used; ++i) {
        const LinSym& c = gamma.coef[i];
        ex.cpart.push_back(c.cpart);
        ex.rows.push_back(c.sym);
    }
    return ex;
}

// rank over the rational-function field in B, by fraction-free elimination
// on polynomial entries. The unknowns may vary with the point (through the
// squared norm), so dependence over Q(B) is the right notion. Entries with
// all coefficients below tol (relative to the row maximum) are flushed when
// tol > 0, which keeps approximated inputs from faking full rank.
int poly_matrix_rank(std::vector<std::vector<PolyB>> M, double tol) {
    if (tol > 0.0) {
        for (auto& row : M) {
            double mx = 0.0;
            for (const PolyB& e : row)
                for (const Rat& c : e) mx = std::max(mx, rat_mag(c));
            if (mx == 0.0) continue;
            for (PolyB& e : row) {
                bool small = true;
                for (const Rat& c : e)
                    if (rat_mag(c) > tol * mx) small = false;
                if (small) e.clear();
            }
        }
    }
    std::size_t nrows = M.size();
    if (nrows == 0) return 0;
    std::size_t ncols = M[0].size();
    int rank = 0;
    std::size_t prow = 0;
    for (std::size_t col = 0; col < ncols && prow < nrows; ++col) {
        std::size_t sel = prow;
        while (sel < nrows && poly_is_zero(M[sel][col])) ++sel;
        if (sel == nrows) continue;
        std::swap(M[sel], M[prow]);
        for (std::size_t r2 = prow + 1; r2 < nrows; ++r2) {
            if (poly_is_zero(M[r2][col])) continue;
            for (std::size_t j = 0; j < ncols; ++j) {
                if (j == col) continue;
                M[r2][j] = poly_sub(poly_mul(M[prow][col], M[r2][j]),
                                    poly_mul(M[r2][col], M[prow][j]));
            }
            M[r2][col].clear();
        }
        ++prow;
        ++rank;
    }
    return rank;
}

bool poly_negligible(const PolyB& p, double tol, double scale) {
    if (poly_is_zero(p)) return true;
    if (tol <= 0.0) return false;
    for (const Rat& c : p)
        if (rat_mag(c) > tol * (1.0 + scale)) return false;
    return true;
}

}  // namespace

LinearSolveResult gamma18_solve(const SeriesS& phi, int n_dim, int orders_used) {
    GammaParts g = gamma_parts(phi, n_dim, orders_used);
    if (orders_used > g.W) throw OrderError("requested more coefficients than the working order");

    PolyB Bpoly{Rat(0), Rat(1)};
    SeriesS phip2D = s_mul(g.phi, s_mul(g.p2, g.D));
    SeriesS D2 = s_mul(g.D, g.D);

    // k-part: -2s phi phi'' D - E paired with (k - eps B) / (k - eps s^2)
    LinSym k_m_epsB = LinSym::from_symbol(sym_k) - LinSym::from_symbol(sym_eps, Bpoly);
    SeriesS term1 = s_scal(s_scal(s_shift(phip2D), k_m_epsB), Rat(-2));
    SeriesS term2 = s_sub(s_scal(s_shift(s_shift(g.E)), LinSym::from_symbol(sym_eps)),
                          s_scal(g.E, LinSym::from_symbol(sym_k)));
    SeriesS term3 = s_scal(s_scal(s_mul(s_mul(g.phi, g.phi), D2), LinSym::from_symbol(sym_c)),
                           Rat(2 * (n_dim + 1)));
    SeriesS term4 = s_scal(s_scal(s_shift(s_mul(g.phi, D2)), LinSym::from_symbol(sym_nu)), Rat(-2));
    SeriesS gamma = s_add(s_add(term1, term2), s_add(term3, term4));

    ExtractedRows ex = extract(gamma, orders_used);
    double tol = phi.exact ? 0.0 : phi.tol;

    std::vector<std::vector<PolyB>> mat;
    for (const auto& row : ex.rows) {
        std::vector<PolyB> r;
        for (int j : {sym_k, sym_c, sym_eps, sym_nu}) r.push_back(row[j]);
        mat.push_back(std::move(r));
    }

    int rank = poly_matrix_rank(std::move(mat), tol);
    LinearSolveResult res;
    res.names = {"k", "c", "eps", "nu"};
    if (rank == 0) throw DegenerateSystemError("coefficient system carries no constraints");
    if (rank == 4) {
        res.status = SolveStatus::UniqueTrivial;
        res.values.assign(4, RatFn{});
        for (const auto& cp : ex.cpart) res.residuals.push_back(cp);  // all zero: homogeneous
    } else {
        res.status = SolveStatus::Underdetermined;
    }
    return res;
}

LinearSolveResult gamma20_solve(const SeriesS& phi, int n_dim, int orders_used) {
    GammaParts g = gamma_parts(phi, n_dim, orders_used);
    if (orders_used > g.W) throw OrderError("requested more coefficients than the working order");

    PolyB Bpoly{Rat(0), Rat(1)};
    SeriesS phip2D = s_mul(g.phi, s_mul(g.p2, g.D));
    SeriesS D2 = s_mul(g.D, g.D);

    SeriesS base = s_sub(s_mul(phip2D, g.w), s_mul(g.p1, g.E));
    SeriesS lam_series = s_mul(g.w, s_add(s_shift(g.E), s_scal(phip2D, LinSym::from_poly(Bpoly))));
    SeriesS del_series = s_mul(g.phi, s_mul(g.w, D2));
    SeriesS gamma = s_add(base, s_add(s_scal(lam_series, -LinSym::from_symbol(sym_lam)),
                                      s_scal(del_series, LinSym::from_symbol(sym_delta))));

    ExtractedRows ex = extract(gamma, orders_used);
    double tol = phi.exact ? 0.0 : phi.tol;

    // 2x2 solve from the first two coefficients, unknowns (lam, delta)
    const PolyB& A00 = ex.rows[0][sym_lam];
    const PolyB& A01 = ex.rows[0][sym_delta];
    const PolyB& A10 = ex.rows[1][sym_lam];
    const PolyB& A11 = ex.rows[1][sym_delta];
    PolyB detA = poly_sub(poly_mul(A00, A11), poly_mul(A01, A10));
    if (poly_is_zero(detA)) throw DegenerateSystemError("leading 2x2 system is singular");

    PolyB rhs0 = poly_scal(ex.cpart[0], Rat(-1));
    PolyB rhs1 = poly_scal(ex.cpart[1], Rat(-1));
    PolyB num_lam = poly_sub(poly_mul(rhs0, A11), poly_mul(A01, rhs1));
    PolyB num_del = poly_sub(poly_mul(A00, rhs1), poly_mul(rhs0, A10));

    LinearSolveResult res;
    res.names = {"lam", "delta"};
    res.values.push_back(ratfn_normalize({num_lam, detA}));
    res.values.push_back(ratfn_normalize({num_del, detA}));
    res.status = (poly_is_zero(res.values[0].num) && poly_is_zero(res.values[1].num))
                     ? SolveStatus::UniqueTrivial
                     : SolveStatus::UniqueNontrivial;

    // every extracted coefficient must vanish under the solution
    for (std::size_t i = 0; i < ex.cpart.size(); ++i) {
        PolyB resid = poly_add(poly_mul(ex.cpart[i], detA),
                               poly_add(poly_mul(ex.rows[i][sym_lam], num_lam),
                                        poly_mul(ex.rows[i][sym_delta], num_del)));
        double scale = 0.0;
        for (const Rat& c2 : detA) scale = std::max(scale, rat_mag(c2));
        if (!poly_negligible(resid, tol, scale))
            throw InconsistentSystemError("higher coefficients contradict the two-parameter solution");
        res.residuals.push_back(resid);
    }
    return res;
}

OdeResiduals ode_residuals_f024(const SeriesS& phi_in, const Rat& a1, const Rat& a2, int N) {
    if (phi_in.N < N + 3) throw OrderError("series too short: third derivatives are consumed");
    if (!phi_in.is_numeric()) throw ParamError("ode residuals need a numeric series");

    int W = N;
    SeriesS phi = s_trunc(phi_in, W);
    SeriesS p1 = s_trunc(s_derive(phi_in), W);
    SeriesS p2 = s_trunc(s_derive(s_derive(phi_in)), W);
    SeriesS p3 = s_trunc(s_derive(s_derive(s_derive(phi_in))), W);
    SeriesS w = s_sub(phi, s_shift(p1));

    auto P = [&](std::vector<Rat> cs) { return SeriesS::from_coeffs(cs, W); };
    auto mul = [](const SeriesS& x, const SeriesS& y) { return s_mul(x, y); };

    Rat a1sq = a1 * a1;
    Rat k1v = 2 * a2 - 3 * a1sq;  // also the coefficient inside the target sqrt
    Rat k2v = 2 * a2 + a1sq;

    SeriesS sw = s_shift(w);
    SeriesS sp1w = s_shift(mul(p1, w));
    SeriesS p1p1 = mul(p1, p1);
    SeriesS ww = mul(w, w);
    SeriesS phip3 = mul(phi, p3);
    SeriesS phip2p2 = mul(phi, mul(p2, p2));

    OdeResiduals out;

    {
        SeriesS t1 = mul(s_add(s_scal(sw, 2 * (a1sq - a2)), p1), s_shift(s_shift(phip3)));
        SeriesS t2 = s_shift(s_shift(mul(P({Rat(1), Rat(0), k1v}), phip2p2)));
        SeriesS t3 = mul(s_add(s_add(mul(P({Rat(1), Rat(0), -2 * a2}), ww),
                                     mul(P({Rat(4), Rat(0), 2 * (3 * a1sq - 4 * a2)}), sp1w)),
                               s_scal(s_shift(s_shift(p1p1)), Rat(6))),
                         p2);
        SeriesS t4 = mul(s_add(s_sub(s_scal(ww, 3 * a1sq - 2 * a2),
                                     s_scal(p1p1, Rat(3))),
                               s_scal(sp1w, 4 * a2 - 3 * a1sq)),
                         w);
        out.f0 = s_add(s_sub(t1, t2), s_add(t3, t4));
    }

    Rat kk = k2v * (3 * a1sq - 2 * a2);  // (2a2+a1^2)(3a1^2-2a2)
    {
        SeriesS t1 = mul(s_sub(mul(P({2 * (a2 - a1sq), Rat(0), kk}), sw),
                               mul(P({Rat(1), Rat(0), -2 * a2}), p1)),
                         phip3);
        SeriesS t2 = mul(mul(P({Rat(1), Rat(0), -k2v}), P({Rat(1), Rat(0), k1v})), phip2p2);
        SeriesS t3 = mul(s_add(s_add(mul(P({4 * a1sq, Rat(0), kk}), ww),
                                     mul(P({2 * (6 * a2 - a1sq), Rat(0), 4 * kk}), sp1w)),
                               mul(P({Rat(-3), Rat(0), 12 * a2}), p1p1)),
                         p2);
        SeriesS t4 = mul(s_sub(s_scal(mul(s_sub(s_scal(s_shift(p1), Rat(3)), phi), w), -kk),
                               s_scal(p1p1, 6 * a2)),
                         w);
        out.f2 = s_add(s_add(t1, t2), s_add(t3, t4));
    }

    {
        SeriesS t1 = mul(s_sub(s_scal(sw, -kk), s_scal(p1, 2 * a2)), phip3);
        SeriesS t2 = s_scal(mul(P({Rat(1), Rat(0), k1v}), phip2p2), k2v);
        SeriesS t3 = mul(s_sub(s_scal(mul(w, s_sub(s_scal(s_shift(p1), Rat(3)), phi)), -kk),
                               s_scal(p1p1, 6 * a2)),
                         p2);
        out.f4 = s_add(s_add(t1, t2), t3);
    }
    return out;
}

namespace {

// (1/pi) * integral_0^pi cos^k t dt: central binomial over 2^k for even k
Rat cosine_moment(int k) {
    if (k % 2 == 1) return Rat(0);
    BigInt num(1);
    for (int i = 0; i < k / 2; ++i) {
        num *= (k - i);
        num /= (i + 1);
    }
    return Rat(num, BigInt(1) << k);
}

}  // namespace

FbCheck fb_series_check(const SeriesS& phi, int n_dim, int M) {
    if (!phi.is_numeric()) throw ParamError("fb check needs a numeric series");
    if (n_dim != 2) throw DimensionError("fb check: only n = 2 is supported");
    if (M > phi.N - 2) throw OrderError("fb check: M exceeds order - 2");

    // 1 / phi^2, expanded in s
    SeriesS inv = s_div(SeriesS::constant(Rat(1), phi.N), phi);
    SeriesS psi = s_mul(inv, inv);

    // averaging s = b cos t turns s^k into (cosine moment_k) b^k; pi cancels
    SeriesS avg = SeriesS::zero(M);
    for (int k = 0; k <= M; ++k) {
        Rat m = cosine_moment(k);
        if (m == 0) continue;
        avg.coef[k] = LinSym::from_rat(psi.coef[k].cpart.empty() ? Rat(0)
                                                                 : psi.coef[k].cpart[0] * m);
    }
    SeriesS f = s_div(SeriesS::constant(Rat(1), M), avg);

    Rat a1 = phi.coef.size() > 1 && !phi.coef[1].cpart.empty() ? phi.coef[1].cpart[0] : Rat(0);
    Rat a2 = phi.coef.size() > 2 && !phi.coef[2].cpart.empty() ? phi.coef[2].cpart[0] : Rat(0);
    SeriesS target = s_sqrt(SeriesS::from_coeffs({Rat(1), Rat(0), 2 * a2 - 3 * a1 * a1}, M));

    FbCheck out;
    out.tol = phi.exact ? 0.0 : phi.tol;
    bool equal = true;
    for (int k = 0; k <= M; ++k) {
        Rat fv = f.coef[k].cpart.empty() ? Rat(0) : f.coef[k].cpart[0];
        Rat tv = target.coef[k].cpart.empty() ? Rat(0) : target.coef[k].cpart[0];
        out.f_series.push_back(fv);
        out.target_series.push_back(tv);
        if (phi.exact ? (fv != tv) : (rat_mag(fv - tv) > out.tol)) equal = false;
    }
    out.equal = equal;
    return out;
}

}  // namespace scurv
