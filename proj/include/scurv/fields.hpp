#pragma once
#include <array>
#include <functional>
#include <optional>

#include "scurv/errors.hpp"
#include "scurv/jets.hpp"
#include "scurv/linalg.hpp"
#include "scurv/phifn.hpp"

namespace scurv {

// scalar chart field evaluated with value/gradient/hessian in x
using SJet = Jet2<double, 2>;
using ScalarField = std::function<SJet(const Vec2&)>;

struct FieldTriple {
    ScalarField sigma, xi, eta;
};

enum class CatalogId {
    ConformalConstB,
    ConformalGeneral,
    Example11,
    Example51,
    FlatParallel,
    RandersControl,
};

struct CatalogParams {
    double a1 = 0.0, a2 = 0.0;   // Example51 coefficients
    double b0 = 0.5;             // ConformalConstB norm
    Vec2 beta_const{0.5, 0.0};   // FlatParallel covector
    double perturb = 0.0;        // adds perturb*(x1)^3 to sigma (negative control)
    std::optional<PhiModel> phi; // override where the family allows it
    std::optional<FieldTriple> fields;  // custom (sigma, xi, eta) for the free families
};

struct MetricSpec {
    int n = 2;
    std::function<std::array<std::array<SJet, 2>, 2>(const Vec2&)> alpha_field;
    std::function<std::array<SJet, 2>(const Vec2&)> beta_field;
    PhiModel phi;
    CatalogId catalog_id = CatalogId::FlatParallel;
    CatalogParams params;
    FieldTriple triple;   // populated for the conformal constructions
    bool has_triple = false;
};

SJet eval_jet(const ScalarField& f, const Vec2& x);
FieldTriple catalog_triple(CatalogId id, const CatalogParams& p);
MetricSpec build_catalog_spec(CatalogId id, const CatalogParams& p = {});

const char* catalog_name(CatalogId id);

}  // namespace scurv
