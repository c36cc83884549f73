#include "scurv/fields.hpp"

#include <cmath>

namespace scurv {

namespace {

SJet jx1(const Vec2& x) { return SJet::variable(x[0], 0); }
SJet jx2(const Vec2& x) { return SJet::variable(x[1], 1); }

// sigma = -1/4 { ln(1 + k2 |x|^2) + 3 ln(1 + k1 |x|^2) }, the conformal factor
// shared by the rotational catalog entries
ScalarField conformal_sigma(double k1, double k2, double perturb) {
    return [=](const Vec2& x) {
        SJet r2 = jx1(x) * jx1(x) + jx2(x) * jx2(x);
        double u1 = 1.0 + k1 * value_of(r2.v);
        double u2 = 1.0 + k2 * value_of(r2.v);
        if (u1 <= 0.0 || u2 <= 0.0) throw DomainError("conformal sigma: log argument <= 0");
        SJet s = (log(1.0 + k2 * r2) + 3.0 * log(1.0 + k1 * r2)) * (-0.25);
        if (perturb != 0.0) s = s + perturb * jx1(x) * jx1(x) * jx1(x);
        return s;
    };
}

ScalarField rotational_xi() {
    return [](const Vec2& x) { return jx2(x); };
}
ScalarField rotational_eta() {
    return [](const Vec2& x) { return -jx1(x); };
}

// generic smooth test fields for the families that leave (sigma, xi, eta) free
ScalarField generic_sigma(double perturb) {
    return [=](const Vec2& x) {
        SJet s = 0.2 * jx1(x) - 0.15 * jx2(x) + 0.1 * jx1(x) * jx2(x);
        if (perturb != 0.0) s = s + perturb * jx1(x) * jx1(x) * jx1(x);
        return s;
    };
}
ScalarField generic_xi() {
    return [](const Vec2& x) { return 0.3 + 0.1 * jx2(x); };
}
ScalarField generic_eta() {
    return [](const Vec2& x) { return -0.2 + 0.1 * jx1(x); };
}

std::function<std::array<std::array<SJet, 2>, 2>(const Vec2&)> conformal_alpha(
    ScalarField sigma) {
    return [sigma](const Vec2& x) {
        SJet e2 = exp(eval_jet(sigma, x) * 2.0);
        std::array<std::array<SJet, 2>, 2> a;
        a[0][0] = e2;
        a[1][1] = e2;
        a[0][1] = SJet::constant(0.0);
        a[1][0] = SJet::constant(0.0);
        return a;
    };
}

// Eq-style beta fields over the conformal base:
//   general:  b_i = e^sigma (xi, eta)_i            (norm b^2 = xi^2 + eta^2)
//   const-b:  b_i = b0 e^sigma (xi, eta)_i / |(xi, eta)|
// (xi, eta) may vanish at isolated points here: beta just has a zero there,
// which stays regular. Only the constant-norm variant divides by the norm.
std::function<std::array<SJet, 2>(const Vec2&)> conformal_beta(FieldTriple t) {
    return [t](const Vec2& x) {
        SJet es = exp(eval_jet(t.sigma, x));
        SJet xi = eval_jet(t.xi, x), eta = eval_jet(t.eta, x);
        return std::array<SJet, 2>{es * xi, es * eta};
    };
}

std::function<std::array<SJet, 2>(const Vec2&)> conformal_beta_const(FieldTriple t, double b0) {
    return [t, b0](const Vec2& x) {
        SJet es = exp(eval_jet(t.sigma, x));
        SJet xi = eval_jet(t.xi, x), eta = eval_jet(t.eta, x);
        SJet n2 = xi * xi + eta * eta;
        if (!(value_of(n2.v) > 0.0)) throw DomainError("beta field: (xi, eta) vanishes at x");
        SJet scale = es * (b0 / sqrt(n2));
        return std::array<SJet, 2>{scale * xi, scale * eta};
    };
}

bool field_identically_zero(const ScalarField& xi, const ScalarField& eta) {
    for (double u : {-0.37, 0.0, 0.53}) {
        for (double v : {-0.41, 0.0, 0.61}) {
            SJet a = eval_jet(xi, {u, v}), b = eval_jet(eta, {u, v});
            if (std::abs(a.v) + std::abs(b.v) > 0.0) return false;
        }
    }
    return true;
}

}  // namespace

SJet eval_jet(const ScalarField& f, const Vec2& x) { return f(x); }

FieldTriple catalog_triple(CatalogId id, const CatalogParams& p) {
    switch (id) {
        case CatalogId::Example11:
            return {conformal_sigma(0.0, 4.0, p.perturb), rotational_xi(), rotational_eta()};
        case CatalogId::Example51: {
            double k1 = 2.0 * p.a2 - 3.0 * p.a1 * p.a1;
            double k2 = 2.0 * p.a2 + p.a1 * p.a1;
            return {conformal_sigma(k1, k2, p.perturb), rotational_xi(), rotational_eta()};
        }
        case CatalogId::ConformalConstB:
        case CatalogId::ConformalGeneral:
        case CatalogId::RandersControl:
            if (p.fields) return *p.fields;
            return {generic_sigma(p.perturb), generic_xi(), generic_eta()};
        case CatalogId::FlatParallel:
            throw ParamError("catalog_triple: flat-parallel has no (sigma, xi, eta) data");
    }
    throw ParamError("catalog_triple: unknown catalog id");
}

MetricSpec build_catalog_spec(CatalogId id, const CatalogParams& p) {
    MetricSpec spec;
    spec.n = 2;
    spec.catalog_id = id;
    spec.params = p;

    if (id == CatalogId::FlatParallel) {
        Vec2 bc = p.beta_const;
        spec.alpha_field = [](const Vec2&) {
            std::array<std::array<SJet, 2>, 2> a;
            a[0][0] = SJet::constant(1.0);
            a[1][1] = SJet::constant(1.0);
            a[0][1] = SJet::constant(0.0);
            a[1][0] = SJet::constant(0.0);
            return a;
        };
        spec.beta_field = [bc](const Vec2&) {
            return std::array<SJet, 2>{SJet::constant(bc[0]), SJet::constant(bc[1])};
        };
        spec.phi = p.phi ? *p.phi : PhiModel::excluded_family(1.0, 0.0, 1.0);
        return spec;
    }

    FieldTriple t = catalog_triple(id, p);
    if (field_identically_zero(t.xi, t.eta))
        throw ParamError("build_catalog_spec: (xi, eta) identically zero");
    spec.triple = t;
    spec.has_triple = true;
    spec.alpha_field = conformal_alpha(t.sigma);

    switch (id) {
        case CatalogId::ConformalConstB:
            if (!(p.b0 > 0.0)) throw ParamError("build_catalog_spec: b0 must be > 0");
            spec.beta_field = conformal_beta_const(t, p.b0);
            spec.phi = p.phi ? *p.phi : PhiModel::excluded_family(1.0, 0.0, 1.0);
            break;
        case CatalogId::ConformalGeneral:
            spec.beta_field = conformal_beta(t);
            spec.phi = p.phi ? *p.phi : PhiModel::class_iv(0.0, 4.0, +1);
            break;
        case CatalogId::Example11:
            spec.beta_field = conformal_beta(t);
            spec.phi = PhiModel::class_iv(0.0, 4.0, +1);
            break;
        case CatalogId::Example51: {
            double k1 = 2.0 * p.a2 - 3.0 * p.a1 * p.a1;
            double k2 = 2.0 * p.a2 + p.a1 * p.a1;
            if (!(k2 > k1)) throw ParamError("build_catalog_spec: class-iv needs k2 > k1");
            spec.beta_field = conformal_beta(t);
            spec.phi = PhiModel::class_iv(k1, k2, +1);
            break;
        }
        case CatalogId::RandersControl:
            spec.beta_field = conformal_beta(t);
            spec.phi = PhiModel::excluded_family(1.0, 0.0, 1.0);
            break;
        default:
            throw ParamError("build_catalog_spec: unknown catalog id");
    }
    return spec;
}

const char* catalog_name(CatalogId id) {
    switch (id) {
        case CatalogId::ConformalConstB: return "conformal-const-b";
        case CatalogId::ConformalGeneral: return "conformal-general";
        case CatalogId::Example11: return "example-1-1";
        case CatalogId::Example51: return "example-5-1";
        case CatalogId::FlatParallel: return "flat-parallel";
        case CatalogId::RandersControl: return "randers-control";
    }
    return "unknown";
}

}  // namespace scurv
