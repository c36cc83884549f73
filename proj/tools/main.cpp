// Batch driver: runs one named pipeline against the catalog or the series
// engine and emits a machine-readable JSON report. Reports are byte-stable:
// keys are sorted at every level, floats carry 17 significant digits, and
// the only randomness is a named generator with an echoed seed.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scurv/classifier.hpp"
#include "scurv/finsler.hpp"
#include "scurv/riemann.hpp"
#include "scurv/series.hpp"

namespace {

using namespace scurv;

constexpr const char* kVersion = "0.1.0";
constexpr const char* kRngName = "mt19937_64";

// ---------------------------------------------------------------------------
// minimal JSON value with sorted object keys, for byte-stable output

struct JV {
    enum class Kind { Null, Bool, Int, Num, Str, Arr, Obj };
    Kind kind = Kind::Null;
    bool b = false;
    long long i = 0;
    double num = 0.0;
    std::string str;
    std::vector<JV> arr;
    std::map<std::string, JV> obj;

    static JV null() { return {}; }
    static JV boolean(bool v) {
        JV j;
        j.kind = Kind::Bool;
        j.b = v;
        return j;
    }
    static JV integer(long long v) {
        JV j;
        j.kind = Kind::Int;
        j.i = v;
        return j;
    }
    static JV number(double v) {
        JV j;
        j.kind = Kind::Num;
        j.num = v;
        return j;
    }
    static JV text(std::string v) {
        JV j;
        j.kind = Kind::Str;
        j.str = std::move(v);
        return j;
    }
    static JV array() {
        JV j;
        j.kind = Kind::Arr;
        return j;
    }
    static JV object() {
        JV j;
        j.kind = Kind::Obj;
        return j;
    }
};

void escape_into(const std::string& s, std::string& out) {
    out += '"';
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

void emit(const JV& v, std::string& out) {
    switch (v.kind) {
        case JV::Kind::Null: out += "null"; break;
        case JV::Kind::Bool: out += v.b ? "true" : "false"; break;
        case JV::Kind::Int: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%lld", v.i);
            out += buf;
            break;
        }
        case JV::Kind::Num: {
            if (!std::isfinite(v.num)) {
                out += "null";  // JSON has no inf/nan
                break;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v.num);
            out += buf;
            break;
        }
        case JV::Kind::Str: escape_into(v.str, out); break;
        case JV::Kind::Arr: {
            out += '[';
            for (std::size_t k = 0; k < v.arr.size(); ++k) {
                if (k) out += ',';
                emit(v.arr[k], out);
            }
            out += ']';
            break;
        }
        case JV::Kind::Obj: {
            out += '{';
            bool first = true;
            for (const auto& [key, val] : v.obj) {
                if (!first) out += ',';
                first = false;
                escape_into(key, out);
                out += ':';
                emit(val, out);
            }
            out += '}';
            break;
        }
    }
}

JV vec2_jv(const Vec2& x) {
    JV a = JV::array();
    a.arr.push_back(JV::number(x[0]));
    a.arr.push_back(JV::number(x[1]));
    return a;
}

// ---------------------------------------------------------------------------
// report assembly

struct Record {
    std::string name;
    JV inputs = JV::object();
    JV computed = JV::object();
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

int write_report(const std::vector<Record>& records, JV config_echo, const std::string& out_path) {
    JV report = JV::object();
    JV checks = JV::array();
    long long failed = 0;
    for (const Record& r : records) {
        JV jr = JV::object();
        jr.obj["computed"] = r.computed;
        jr.obj["inputs"] = r.inputs;
        jr.obj["name"] = JV::text(r.name);
        jr.obj["pass"] = JV::boolean(r.pass);
        jr.obj["residual"] = JV::number(r.residual);
        jr.obj["tolerance"] = JV::number(r.tolerance);
        checks.arr.push_back(std::move(jr));
        if (!r.pass) ++failed;
    }
    report.obj["checks"] = std::move(checks);
    report.obj["config"] = std::move(config_echo);
    JV summary = JV::object();
    summary.obj["all_pass"] = JV::boolean(failed == 0);
    summary.obj["checks"] = JV::integer(static_cast<long long>(records.size()));
    summary.obj["failed"] = JV::integer(failed);
    report.obj["summary"] = std::move(summary);
    report.obj["version"] = JV::text(kVersion);

    std::string text;
    emit(report, text);
    text += '\n';
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw ConfigError("out: cannot open '" + out_path + "' for writing");
        f << text;
    }
    return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// seeded sampling; the generator name is echoed in every report that draws

struct Sampler {
    std::mt19937_64 gen;
    explicit Sampler(unsigned long long seed) : gen(seed) {}
    double u01() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    Vec2 disk(double rmax, double rmin = 0.0) {
        for (;;) {
            Vec2 x{(2.0 * u01() - 1.0) * rmax, (2.0 * u01() - 1.0) * rmax};
            double r = std::hypot(x[0], x[1]);
            if (r <= rmax && r >= rmin) return x;
        }
    }
    Vec2 dir() {
        double th = 2.0 * 3.14159265358979323846 * u01();
        return {std::cos(th), std::sin(th)};
    }
};

// ---------------------------------------------------------------------------
// config file: JSON object whose keys override the matching flags

using Setter = std::function<bool(const nlohmann::json&)>;

void apply_config(const std::string& path, const std::map<std::string, Setter>& setters) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot read '" + path + "'");
    nlohmann::json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: parse failure: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    for (const auto& [key, val] : j.items()) {
        auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("config: unknown key '" + key + "'");
        if (!it->second(val)) throw ConfigError("config: bad value for key '" + key + "'");
    }
}

Setter set_double(double& slot) {
    return [&slot](const nlohmann::json& v) {
        if (!v.is_number()) return false;
        slot = v.get<double>();
        return true;
    };
}
Setter set_ll(long long& slot) {
    return [&slot](const nlohmann::json& v) {
        if (!v.is_number_integer()) return false;
        slot = v.get<long long>();
        return true;
    };
}
Setter set_ull(unsigned long long& slot) {
    return [&slot](const nlohmann::json& v) {
        if (!v.is_number_integer()) return false;
        slot = v.get<unsigned long long>();
        return true;
    };
}
Setter set_int(int& slot) {
    return [&slot](const nlohmann::json& v) {
        if (!v.is_number_integer()) return false;
        slot = v.get<int>();
        return true;
    };
}
Setter set_string(std::string& slot) {
    return [&slot](const nlohmann::json& v) {
        if (v.is_string()) {
            slot = v.get<std::string>();
            return true;
        }
        if (v.is_number()) {  // rational-valued keys may arrive as numbers
            std::ostringstream os;
            os.precision(17);
            os << v.get<double>();
            slot = os.str();
            return true;
        }
        return false;
    };
}
Setter set_vec2(std::optional<Vec2>& slot) {
    return [&slot](const nlohmann::json& v) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) return false;
        slot = Vec2{v[0].get<double>(), v[1].get<double>()};
        return true;
    };
}

// ---------------------------------------------------------------------------
// exact rational parsing: integer, p/q, or plain decimal

Rat parse_rat(const std::string& text) {
    std::string s = text;
    if (s.empty()) throw ConfigError("empty rational literal");
    if (s.find('e') != std::string::npos || s.find('E') != std::string::npos)
        throw ConfigError("rational literal '" + text + "': use p/q or a plain decimal");
    try {
        auto dotpos = s.find('.');
        if (dotpos == std::string::npos) return Rat(s);
        bool neg = false;
        if (s[0] == '+' || s[0] == '-') {
            neg = s[0] == '-';
            s = s.substr(1);
            dotpos -= 1;
        }
        std::string digits = s.substr(0, dotpos) + s.substr(dotpos + 1);
        std::size_t frac_len = s.size() - dotpos - 1;
        if (digits.empty()) throw ConfigError("rational literal '" + text + "' has no digits");
        Rat num{boost::multiprecision::cpp_int(digits)};
        boost::multiprecision::cpp_int den = 1;
        for (std::size_t k = 0; k < frac_len; ++k) den *= 10;
        Rat r = num / Rat(den);
        return neg ? -r : r;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("rational literal '" + text + "' does not parse");
    }
}

std::string rat_str(const Rat& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

std::optional<CatalogId> find_catalog(const std::string& name) {
    for (CatalogId id : {CatalogId::ConformalConstB, CatalogId::ConformalGeneral,
                         CatalogId::Example11, CatalogId::Example51, CatalogId::FlatParallel,
                         CatalogId::RandersControl})
        if (name == catalog_name(id)) return id;
    return std::nullopt;
}

Vec2 parse_point(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw ConfigError("point '" + text + "': expected 'a,b'");
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ConfigError("point '" + text + "' does not parse");
    }
}

const char* status_str(SolveStatus st) {
    switch (st) {
        case SolveStatus::UniqueTrivial: return "unique-trivial";
        case SolveStatus::UniqueNontrivial: return "unique-nontrivial";
        case SolveStatus::Underdetermined: return "underdetermined";
    }
    return "unknown";
}

bool series_is_zero(const SeriesS& s) {
    for (const auto& c : s.coef)
        if (!c.is_zero()) return false;
    return true;
}

Rat coef_rat(const SeriesS& s, int k) {
    const PolyB& p = s.coef[static_cast<std::size_t>(k)].cpart;
    return p.empty() ? Rat(0) : p[0];
}

double series_max_mag(const SeriesS& s) {
    double m = 0.0;
    for (const auto& c : s.coef)
        for (const Rat& q : c.cpart) m = std::max(m, std::fabs(q.convert_to<double>()));
    return m;
}

// ---------------------------------------------------------------------------
// shared option bags

struct CatalogOpts {
    std::string name;
    double a1 = 1.0, a2 = 1.5;
    double b0 = 0.5;
    double perturb = 0.0;
    long long points = 0;
    unsigned long long seed = 1;
    double tol = 1e-6;
    std::string config, out;
};

MetricSpec build_spec(const CatalogOpts& o, CatalogId id) {
    CatalogParams p;
    p.a1 = o.a1;
    p.a2 = o.a2;
    p.b0 = o.b0;
    p.perturb = o.perturb;
    return build_catalog_spec(id, p);
}

JV catalog_echo(const CatalogOpts& o, const char* command, bool sampled) {
    JV c = JV::object();
    c.obj["a1"] = JV::number(o.a1);
    c.obj["a2"] = JV::number(o.a2);
    c.obj["b0"] = JV::number(o.b0);
    c.obj["command"] = JV::text(command);
    c.obj["name"] = JV::text(o.name);
    c.obj["perturb"] = JV::number(o.perturb);
    c.obj["points"] = JV::integer(o.points);
    if (sampled) {
        c.obj["rng"] = JV::text(kRngName);
        c.obj["seed"] = JV::integer(static_cast<long long>(o.seed));
    }
    c.obj["tolerance"] = JV::number(o.tol);
    return c;
}

std::map<std::string, Setter> catalog_setters(CatalogOpts& o) {
    return {
        {"name", set_string(o.name)},     {"a1", set_double(o.a1)},
        {"a2", set_double(o.a2)},         {"b0", set_double(o.b0)},
        {"perturb", set_double(o.perturb)}, {"points", set_ll(o.points)},
        {"seed", set_ull(o.seed)},        {"tol", set_double(o.tol)},
        {"out", set_string(o.out)},
    };
}

// ---------------------------------------------------------------------------
// verify-example: reproduce the pinned claims of a catalog entry

int run_verify_example(CatalogOpts o) {
    if (!o.config.empty()) apply_config(o.config, catalog_setters(o));
    auto id = find_catalog(o.name);
    if (!id) throw ConfigError("name: unknown example '" + o.name + "'");
    if (*id == CatalogId::ConformalGeneral || *id == CatalogId::RandersControl)
        throw ConfigError("name: '" + o.name + "' carries no pinned claim to verify");
    if (o.points <= 0) o.points = 200;

    MetricSpec spec = build_spec(o, *id);
    Sampler smp(o.seed);
    std::vector<Record> records;

    JV base_inputs = JV::object();
    base_inputs.obj["name"] = JV::text(o.name);
    base_inputs.obj["points"] = JV::integer(o.points);
    base_inputs.obj["seed"] = JV::integer(static_cast<long long>(o.seed));

    bool wants_zero_s = *id != CatalogId::ConformalConstB;
    if (wants_zero_s) {
        double worst = 0.0;
        Vec2 worst_x{}, worst_y{};
        for (long long k = 0; k < o.points; ++k) {
            Vec2 x = smp.disk(0.9);
            Vec2 y = smp.dir();
            double F = fundamental(spec, x, y).first;
            double S = s_curvature_direct(spec, x, y);
            double rel = std::fabs(S) / (1.0 + F);
            if (rel > worst) {
                worst = rel;
                worst_x = x;
                worst_y = y;
            }
        }
        Record r;
        r.name = "max-s-curvature";
        r.inputs = base_inputs;
        r.computed.obj["max_rel_s"] = JV::number(worst);
        r.computed.obj["worst_x"] = vec2_jv(worst_x);
        r.computed.obj["worst_y"] = vec2_jv(worst_y);
        r.residual = worst;
        r.tolerance = o.tol;
        r.pass = worst <= o.tol;
        records.push_back(std::move(r));
    }

    if (*id == CatalogId::Example11 || *id == CatalogId::Example51) {
        double worst = 0.0;
        Sampler smp2(o.seed + 1);
        for (int k = 0; k < 100; ++k) {
            Vec2 x = smp2.disk(0.9);
            RSData rs = rs_decompose(spec, x);
            worst = std::max(worst, std::fabs(rs.b2 - (x[0] * x[0] + x[1] * x[1])));
        }
        Record r;
        r.name = "norm-identity";
        r.inputs = base_inputs;
        r.computed.obj["max_abs_diff"] = JV::number(worst);
        r.residual = worst;
        r.tolerance = 1e-12;
        r.pass = worst <= 1e-12;
        records.push_back(std::move(r));
    }

    if (*id == CatalogId::Example51) {
        FieldTriple triple = catalog_triple(*id, spec.params);
        double worst = 0.0;
        Sampler smp3(o.seed + 2);
        int used = 0;
        while (used < 50) {
            Vec2 x = smp3.disk(0.9, 0.1);
            if (std::fabs(x[1]) < 0.05) continue;  // the system divides by xi = x^2
            PdeResiduals pr = pde_residuals(triple, spec.params, x);
            for (double c : pr.res76) worst = std::max(worst, c);
            ++used;
        }
        Record r;
        r.name = "pde-system";
        r.inputs = base_inputs;
        r.computed.obj["max_component"] = JV::number(worst);
        r.computed.obj["points_used"] = JV::integer(used);
        r.residual = worst;
        r.tolerance = 1e-10;
        r.pass = worst <= 1e-10;
        records.push_back(std::move(r));
    }

    if (*id == CatalogId::ConformalConstB) {
        double worst = 0.0;
        Sampler smp4(o.seed + 3);
        for (int k = 0; k < 100; ++k) {
            Vec2 x = smp4.disk(0.9);
            RSData rs = rs_decompose(spec, x);
            worst = std::max(worst, std::fabs(rs.b2 - o.b0 * o.b0));
        }
        Record r;
        r.name = "constant-norm";
        r.inputs = base_inputs;
        r.computed.obj["max_abs_diff"] = JV::number(worst);
        r.residual = worst;
        r.tolerance = 1e-12;
        r.pass = worst <= 1e-12;
        records.push_back(std::move(r));
    }

    return write_report(records, catalog_echo(o, "verify-example", true), o.out);
}

// ---------------------------------------------------------------------------
// classify: residuals for the four classes plus the isotropy fit

int run_classify(CatalogOpts o, std::string expect, double tol_s) {
    if (!o.config.empty()) {
        auto setters = catalog_setters(o);
        setters["expect"] = set_string(expect);
        setters["tol-s"] = set_double(tol_s);
        apply_config(o.config, setters);
    }
    auto id = find_catalog(o.name);
    if (!id) throw ConfigError("name: unknown catalog entry '" + o.name + "'");
    if (o.points <= 0) o.points = 50;

    MetricSpec spec = build_spec(o, *id);
    Sampler smp(o.seed);
    std::vector<Vec2> pts;
    for (long long k = 0; k < o.points; ++k) pts.push_back(smp.disk(0.9, 0.05));

    ClassReport rep = classify(spec, pts, o.tol);

    const char* tags[4] = {"class-i", "class-ii", "class-iii", "class-iv"};
    const ClassVerdict* verdicts[4] = {&rep.class_i, &rep.class_ii, &rep.class_iii,
                                       &rep.class_iv};
    std::string observed;
    double best = std::numeric_limits<double>::infinity();
    JV per_class = JV::object();
    for (int k = 0; k < 4; ++k) {
        JV cell = JV::object();
        cell.obj["beta"] = JV::number(verdicts[k]->beta_residual);
        cell.obj["phi"] = JV::number(verdicts[k]->phi_residual);
        cell.obj["verdict"] = JV::boolean(verdicts[k]->pass);
        per_class.obj[tags[k]] = std::move(cell);
        if (verdicts[k]->pass) {
            if (!observed.empty()) observed += ",";
            observed += tags[k] + 6;  // strip the "class-" prefix
        }
        best = std::min(best,
                        std::max(verdicts[k]->beta_residual, verdicts[k]->phi_residual));
    }
    if (observed.empty()) observed = "none";

    JV inputs = JV::object();
    inputs.obj["name"] = JV::text(o.name);
    inputs.obj["points"] = JV::integer(o.points);
    inputs.obj["seed"] = JV::integer(static_cast<long long>(o.seed));

    std::vector<Record> records;
    {
        Record r;
        r.name = "classification";
        r.inputs = inputs;
        r.computed = per_class;
        r.computed.obj["verdicts"] = JV::text(observed);
        r.residual = best;
        r.tolerance = o.tol;
        r.pass = observed != "none";
        records.push_back(std::move(r));
    }
    {
        double cmin = 0.0, cmax = 0.0;
        if (!rep.c_fit.empty()) {
            cmin = cmax = rep.c_fit[0];
            for (double c : rep.c_fit) {
                cmin = std::min(cmin, c);
                cmax = std::max(cmax, c);
            }
        }
        Record r;
        r.name = "isotropy-fit";
        r.inputs = inputs;
        r.computed.obj["c_max"] = JV::number(cmax);
        r.computed.obj["c_min"] = JV::number(cmin);
        r.residual = rep.isotropy_residual;
        r.tolerance = tol_s;
        r.pass = rep.isotropy_residual <= tol_s;
        records.push_back(std::move(r));
    }
    if (!expect.empty()) {
        Record r;
        r.name = "expected-classes";
        r.inputs = inputs;
        r.computed.obj["expected"] = JV::text(expect);
        r.computed.obj["observed"] = JV::text(observed);
        r.pass = expect == observed;
        r.residual = r.pass ? 0.0 : 1.0;
        r.tolerance = 0.0;
        records.push_back(std::move(r));
    }

    JV echo = catalog_echo(o, "classify", true);
    if (!expect.empty()) echo.obj["expect"] = JV::text(expect);
    echo.obj["tolerance_s"] = JV::number(tol_s);
    return write_report(records, std::move(echo), o.out);
}

// ---------------------------------------------------------------------------
// s-curvature: the divergence route against the closed formula

int run_scurvature(CatalogOpts o, std::string x_text, std::string y_text) {
    if (!o.config.empty()) {
        auto setters = catalog_setters(o);
        std::optional<Vec2> cx, cy;
        setters["x"] = set_vec2(cx);
        setters["y"] = set_vec2(cy);
        apply_config(o.config, setters);
        char buf[80];
        if (cx) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", (*cx)[0], (*cx)[1]);
            x_text = buf;
        }
        if (cy) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g", (*cy)[0], (*cy)[1]);
            y_text = buf;
        }
    }
    auto id = find_catalog(o.name);
    if (!id) throw ConfigError("name: unknown catalog entry '" + o.name + "'");
    if (o.points <= 0) o.points = 100;
    MetricSpec spec = build_spec(o, *id);

    std::vector<Record> records;
    JV echo = catalog_echo(o, "s-curvature", x_text.empty());

    if (!x_text.empty()) {
        Vec2 x = parse_point(x_text);
        Vec2 y = y_text.empty() ? Vec2{1.0, 0.0} : parse_point(y_text);
        echo.obj["x"] = vec2_jv(x);
        echo.obj["y"] = vec2_jv(y);
        SCurvatureReport rep{};
        rep.S_direct = s_curvature_direct(spec, x, y);
        rep.S_formula = s_curvature_formula(spec, x, y);
        rep.c_hat = isotropy_fit(spec, x, unit_directions(16)).first;
        rep.residual = std::fabs(rep.S_direct - rep.S_formula) / (1.0 + std::fabs(rep.S_direct));
        Record r;
        r.name = "point-values";
        r.inputs.obj["name"] = JV::text(o.name);
        r.inputs.obj["x"] = vec2_jv(x);
        r.inputs.obj["y"] = vec2_jv(y);
        r.computed.obj["c_hat"] = JV::number(rep.c_hat);
        r.computed.obj["s_direct"] = JV::number(rep.S_direct);
        r.computed.obj["s_formula"] = JV::number(rep.S_formula);
        r.residual = rep.residual;
        r.tolerance = o.tol;
        r.pass = rep.residual <= o.tol;
        records.push_back(std::move(r));
        return write_report(records, std::move(echo), o.out);
    }

    Sampler smp(o.seed);
    double worst = 0.0;
    long long used = 0, skipped = 0;
    Vec2 worst_x{}, worst_y{};
    for (long long k = 0; k < o.points; ++k) {
        Vec2 x = smp.disk(0.9);
        Vec2 y = smp.dir();
        RSData rs = rs_decompose(spec, x);
        if (std::sqrt(std::max(rs.b2, 0.0)) <= 1e-3) {
            ++skipped;  // the closed formula divides by the norm
            continue;
        }
        double sd = s_curvature_direct(spec, x, y);
        double sf = s_curvature_formula(spec, x, y);
        double rel = std::fabs(sd - sf) / (1.0 + std::fabs(sd));
        if (rel > worst) {
            worst = rel;
            worst_x = x;
            worst_y = y;
        }
        ++used;
    }
    Record r;
    r.name = "cross-check";
    r.inputs.obj["name"] = JV::text(o.name);
    r.inputs.obj["points"] = JV::integer(o.points);
    r.inputs.obj["seed"] = JV::integer(static_cast<long long>(o.seed));
    r.computed.obj["evaluated"] = JV::integer(used);
    r.computed.obj["max_rel_diff"] = JV::number(worst);
    r.computed.obj["skipped_small_norm"] = JV::integer(skipped);
    r.computed.obj["worst_x"] = vec2_jv(worst_x);
    r.computed.obj["worst_y"] = vec2_jv(worst_y);
    r.residual = worst;
    r.tolerance = o.tol;
    r.pass = worst <= o.tol && used > 0;
    records.push_back(std::move(r));
    return write_report(records, std::move(echo), o.out);
}

// ---------------------------------------------------------------------------
// series-audit: exact solves and identities on the phi power series

struct SeriesOpts {
    std::string phi = "class-iv";
    std::string k1 = "0", k2 = "4";
    int sign = +1;
    int order = 12;
    int orders_used = 5;
    std::string config, out;
};

int run_series_audit(SeriesOpts o) {
    if (!o.config.empty())
        apply_config(o.config, {
                                   {"phi", set_string(o.phi)},
                                   {"k1", set_string(o.k1)},
                                   {"k2", set_string(o.k2)},
                                   {"sign", set_int(o.sign)},
                                   {"order", set_int(o.order)},
                                   {"orders-used", set_int(o.orders_used)},
                                   {"out", set_string(o.out)},
                               });
    if (o.phi != "class-iv")
        throw ConfigError("phi: series-audit supports only 'class-iv'");
    if (o.order < o.orders_used + 1) throw ConfigError("order: too small for the solves");

    Rat k1 = parse_rat(o.k1), k2 = parse_rat(o.k2);
    int ns = o.order + 4;
    SeriesS phi = phi_series_class_iv(k1, k2, o.sign, 2, ns);
    Rat a1 = coef_rat(phi, 1), a2 = coef_rat(phi, 2);
    double num_tol = phi.exact ? 0.0 : phi.tol;

    JV inputs = JV::object();
    inputs.obj["k1"] = JV::text(o.k1);
    inputs.obj["k2"] = JV::text(o.k2);
    inputs.obj["order"] = JV::integer(o.order);
    inputs.obj["orders_used"] = JV::integer(o.orders_used);
    inputs.obj["sign"] = JV::integer(o.sign);

    std::vector<Record> records;
    {
        LinearSolveResult g18 = gamma18_solve(phi, 2, o.orders_used);
        bool trivial = g18.status == SolveStatus::UniqueTrivial;
        bool all_zero = trivial;
        Record r;
        r.name = "gamma18";
        r.inputs = inputs;
        r.computed.obj["status"] = JV::text(status_str(g18.status));
        if (trivial) {
            for (std::size_t k = 0; k < g18.names.size(); ++k) {
                r.computed.obj[g18.names[k]] = JV::text(ratfn_to_string(g18.values[k]));
                if (!poly_is_zero(g18.values[k].num)) all_zero = false;
            }
            if (all_zero) r.computed.obj["result"] = JV::text("k=c=eps=nu=0");
        }
        r.pass = trivial && all_zero;
        r.residual = r.pass ? 0.0 : 1.0;
        r.tolerance = 0.0;
        records.push_back(std::move(r));
    }
    {
        LinearSolveResult g20 = gamma20_solve(phi, 2, o.orders_used);
        bool resolved = g20.status != SolveStatus::Underdetermined;
        bool clean = resolved;
        Record r;
        r.name = "gamma20";
        r.inputs = inputs;
        r.computed.obj["status"] = JV::text(status_str(g20.status));
        if (resolved) {
            for (const PolyB& resid : g20.residuals)
                if (!poly_is_zero(resid)) clean = false;
            r.computed.obj["delta"] = JV::text(ratfn_to_string(g20.values[1]));
            r.computed.obj["delta_at_quarter"] =
                JV::number(ratfn_eval(g20.values[1], Rat(1, 4)).convert_to<double>());
            r.computed.obj["lambda"] = JV::text(ratfn_to_string(g20.values[0]));
            r.computed.obj["lambda_at_quarter"] =
                JV::number(ratfn_eval(g20.values[0], Rat(1, 4)).convert_to<double>());
        }
        r.pass = resolved && clean;
        r.residual = r.pass ? 0.0 : 1.0;
        r.tolerance = 0.0;
        records.push_back(std::move(r));
    }
    {
        OdeResiduals ode = ode_residuals_f024(phi, a1, a2, o.order);
        double worst = std::max({series_max_mag(ode.f0), series_max_mag(ode.f2),
                                 series_max_mag(ode.f4)});
        bool zero = series_is_zero(ode.f0) && series_is_zero(ode.f2) && series_is_zero(ode.f4);
        Record r;
        r.name = "ode-residuals";
        r.inputs = inputs;
        r.computed.obj["all_zero"] = JV::boolean(zero);
        r.computed.obj["checked_through"] = JV::integer(o.order);
        r.computed.obj["max_coefficient"] = JV::number(worst);
        r.residual = worst;
        r.tolerance = num_tol;
        r.pass = worst <= num_tol;
        records.push_back(std::move(r));
    }
    {
        int M = std::min(10, ns - 2);
        FbCheck fb = fb_series_check(phi, 2, M);
        Record r;
        r.name = "fb-series";
        r.inputs = inputs;
        std::string coeffs;
        for (std::size_t k = 0; k < fb.f_series.size(); ++k) {
            if (k) coeffs += ", ";
            coeffs += rat_str(fb.f_series[k]);
        }
        r.computed.obj["exact"] = JV::boolean(phi.exact);
        r.computed.obj["f_coefficients"] = JV::text(coeffs);
        r.computed.obj["through_order"] = JV::integer(M);
        r.pass = fb.equal;
        r.residual = r.pass ? 0.0 : 1.0;
        r.tolerance = fb.tol;
        records.push_back(std::move(r));
    }

    JV echo = JV::object();
    echo.obj["command"] = JV::text("series-audit");
    echo.obj["k1"] = JV::text(o.k1);
    echo.obj["k2"] = JV::text(o.k2);
    echo.obj["order"] = JV::integer(o.order);
    echo.obj["orders_used"] = JV::integer(o.orders_used);
    echo.obj["phi"] = JV::text(o.phi);
    echo.obj["sign"] = JV::integer(o.sign);
    return write_report(records, std::move(echo), o.out);
}

// ---------------------------------------------------------------------------
// fb-check: averaged volume factor, series identity plus quadrature

struct FbOpts {
    std::string phi = "class-iv";
    std::string k1 = "0", k2 = "4";
    int sign = +1;
    int order = 10;
    double tol = 1e-8;
    std::string config, out;
};

int run_fb_check(FbOpts o) {
    if (!o.config.empty())
        apply_config(o.config, {
                                   {"phi", set_string(o.phi)},
                                   {"k1", set_string(o.k1)},
                                   {"k2", set_string(o.k2)},
                                   {"sign", set_int(o.sign)},
                                   {"order", set_int(o.order)},
                                   {"tol", set_double(o.tol)},
                                   {"out", set_string(o.out)},
                               });

    std::vector<Record> records;
    JV inputs = JV::object();
    inputs.obj["k1"] = JV::text(o.k1);
    inputs.obj["k2"] = JV::text(o.k2);
    inputs.obj["order"] = JV::integer(o.order);
    inputs.obj["phi"] = JV::text(o.phi);

    if (o.phi == "class-iv") {
        Rat k1 = parse_rat(o.k1), k2 = parse_rat(o.k2);
        SeriesS phi = phi_series_class_iv(k1, k2, o.sign, 2, o.order + 2);
        FbCheck fb = fb_series_check(phi, 2, o.order);
        Record r;
        r.name = "series-identity";
        r.inputs = inputs;
        r.computed.obj["equal"] = JV::boolean(fb.equal);
        r.computed.obj["exact"] = JV::boolean(phi.exact);
        r.pass = fb.equal;
        r.residual = r.pass ? 0.0 : 1.0;
        r.tolerance = fb.tol;
        records.push_back(std::move(r));

        double k1d = k1.convert_to<double>(), k2d = k2.convert_to<double>();
        PhiModel model = PhiModel::class_iv(k1d, k2d, o.sign);
        double worst = 0.0;
        for (int k = 1; k <= 8; ++k) {
            double b = 0.1 * k;
            if (1.0 + k1d * b * b <= 0.0) continue;
            double got = f_of_b(model, 2, b);
            double want = std::sqrt(1.0 + k1d * b * b);
            worst = std::max(worst, std::fabs(got - want) / std::fabs(want));
        }
        Record q;
        q.name = "quadrature-vs-closed";
        q.inputs = inputs;
        q.computed.obj["max_rel_error"] = JV::number(worst);
        q.residual = worst;
        q.tolerance = o.tol;
        q.pass = worst <= o.tol;
        records.push_back(std::move(q));
    } else if (o.phi == "randers") {
        PhiModel model = PhiModel::excluded_family(1.0, 0.0, 1.0);
        double worst = 0.0;
        for (int k = 1; k <= 8; ++k) {
            double b = 0.1 * k;
            double got = f_of_b(model, 2, b);
            double want = std::pow(1.0 - b * b, 1.5);
            worst = std::max(worst, std::fabs(got - want) / std::fabs(want));
        }
        Record q;
        q.name = "quadrature-vs-closed";
        q.inputs = inputs;
        q.computed.obj["max_rel_error"] = JV::number(worst);
        q.residual = worst;
        q.tolerance = o.tol;
        q.pass = worst <= o.tol;
        records.push_back(std::move(q));
    } else {
        throw ConfigError("phi: fb-check supports 'class-iv' or 'randers'");
    }

    JV echo = JV::object();
    echo.obj["command"] = JV::text("fb-check");
    echo.obj["k1"] = JV::text(o.k1);
    echo.obj["k2"] = JV::text(o.k2);
    echo.obj["order"] = JV::integer(o.order);
    echo.obj["phi"] = JV::text(o.phi);
    echo.obj["sign"] = JV::integer(o.sign);
    echo.obj["tolerance"] = JV::number(o.tol);
    return write_report(records, std::move(echo), o.out);
}

// ---------------------------------------------------------------------------
// regularity: positivity margin of the metric-defining inequality

struct RegOpts {
    std::string phi = "class-iv";
    double k1 = 0.0, k2 = 4.0, k3 = 0.0;
    int sign = +1;
    double b = 0.8;
    std::string config, out;
};

int run_regularity(RegOpts o) {
    if (!o.config.empty())
        apply_config(o.config, {
                                   {"phi", set_string(o.phi)},
                                   {"k1", set_double(o.k1)},
                                   {"k2", set_double(o.k2)},
                                   {"k3", set_double(o.k3)},
                                   {"sign", set_int(o.sign)},
                                   {"b", set_double(o.b)},
                                   {"out", set_string(o.out)},
                               });
    PhiModel model;
    if (o.phi == "class-iv") {
        model = PhiModel::class_iv(o.k1, o.k2, o.sign);
    } else if (o.phi == "excluded") {
        model = PhiModel::excluded_family(o.k1, o.k2, o.k3);
    } else {
        throw ConfigError("phi: regularity supports 'class-iv' or 'excluded'");
    }
    double margin = regularity_margin(model, o.b);

    Record r;
    r.name = "positivity-margin";
    r.inputs.obj["b"] = JV::number(o.b);
    r.inputs.obj["k1"] = JV::number(o.k1);
    r.inputs.obj["k2"] = JV::number(o.k2);
    r.inputs.obj["k3"] = JV::number(o.k3);
    r.inputs.obj["phi"] = JV::text(o.phi);
    r.computed.obj["margin"] = JV::number(margin);
    r.residual = margin > 0.0 ? 0.0 : (std::isfinite(margin) ? -margin : 1.0);
    r.tolerance = 0.0;
    r.pass = std::isfinite(margin) && margin > 0.0;

    JV echo = JV::object();
    echo.obj["b"] = JV::number(o.b);
    echo.obj["command"] = JV::text("regularity");
    echo.obj["k1"] = JV::number(o.k1);
    echo.obj["k2"] = JV::number(o.k2);
    echo.obj["k3"] = JV::number(o.k3);
    echo.obj["phi"] = JV::text(o.phi);
    echo.obj["sign"] = JV::integer(o.sign);
    return write_report({r}, std::move(echo), o.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification toolkit for two-dimensional metrics built from a "
                 "Riemannian base, a one-form, and a profile function"};
    app.require_subcommand(1);

    CatalogOpts vo;
    auto* ve = app.add_subcommand("verify-example", "reproduce the pinned claims of a catalog entry");
    ve->add_option("--name", vo.name, "catalog entry")->required();
    ve->add_option("--a1", vo.a1, "first profile coefficient");
    ve->add_option("--a2", vo.a2, "second profile coefficient");
    ve->add_option("--b0", vo.b0, "constant-norm parameter");
    ve->add_option("--perturb", vo.perturb, "cubic conformal perturbation (negative control)");
    ve->add_option("--points", vo.points, "sample size");
    ve->add_option("--seed", vo.seed, "generator seed");
    ve->add_option("--tol", vo.tol, "pass tolerance");
    ve->add_option("--config", vo.config, "JSON config overriding flags");
    ve->add_option("--out", vo.out, "report path (default stdout)");

    CatalogOpts co;
    std::string expect;
    double tol_s = 1e-6;
    co.tol = 1e-8;
    auto* cl = app.add_subcommand("classify", "residuals and verdicts for the four classes");
    cl->add_option("--name", co.name, "catalog entry")->required();
    cl->add_option("--a1", co.a1, "first profile coefficient");
    cl->add_option("--a2", co.a2, "second profile coefficient");
    cl->add_option("--b0", co.b0, "constant-norm parameter");
    cl->add_option("--perturb", co.perturb, "cubic conformal perturbation (negative control)");
    cl->add_option("--points", co.points, "sample size");
    cl->add_option("--seed", co.seed, "generator seed");
    cl->add_option("--tol", co.tol, "algebraic tolerance");
    cl->add_option("--tol-s", tol_s, "curvature-derived tolerance");
    cl->add_option("--expect", expect, "comma list of expected classes, e.g. 'iv'");
    cl->add_option("--config", co.config, "JSON config overriding flags");
    cl->add_option("--out", co.out, "report path (default stdout)");

    CatalogOpts so;
    std::string x_text, y_text;
    auto* sc = app.add_subcommand("s-curvature", "divergence route against the closed formula");
    sc->add_option("--name", so.name, "catalog entry")->required();
    sc->add_option("--a1", so.a1, "first profile coefficient");
    sc->add_option("--a2", so.a2, "second profile coefficient");
    sc->add_option("--b0", so.b0, "constant-norm parameter");
    sc->add_option("--perturb", so.perturb, "cubic conformal perturbation (negative control)");
    sc->add_option("--points", so.points, "sample size");
    sc->add_option("--seed", so.seed, "generator seed");
    sc->add_option("--tol", so.tol, "pass tolerance");
    sc->add_option("--x", x_text, "single chart point 'a,b' (skips sampling)");
    sc->add_option("--y", y_text, "direction 'a,b' for the single-point mode");
    sc->add_option("--config", so.config, "JSON config overriding flags");
    sc->add_option("--out", so.out, "report path (default stdout)");

    SeriesOpts se;
    auto* sa = app.add_subcommand("series-audit", "exact solves and identities on the profile series");
    sa->add_option("--phi", se.phi, "profile family (class-iv)");
    sa->add_option("--k1", se.k1, "first family constant, rational");
    sa->add_option("--k2", se.k2, "second family constant, rational");
    sa->add_option("--sign", se.sign, "branch sign, +1 or -1");
    sa->add_option("--order", se.order, "series order for the identity checks");
    sa->add_option("--orders-used", se.orders_used, "coefficient rows fed to the solves");
    sa->add_option("--config", se.config, "JSON config overriding flags");
    sa->add_option("--out", se.out, "report path (default stdout)");

    FbOpts fo;
    auto* fb = app.add_subcommand("fb-check", "averaged volume factor: series and quadrature");
    fb->add_option("--phi", fo.phi, "profile family (class-iv or randers)");
    fb->add_option("--k1", fo.k1, "first family constant, rational");
    fb->add_option("--k2", fo.k2, "second family constant, rational");
    fb->add_option("--sign", fo.sign, "branch sign, +1 or -1");
    fb->add_option("--order", fo.order, "series comparison order");
    fb->add_option("--tol", fo.tol, "quadrature tolerance");
    fb->add_option("--config", fo.config, "JSON config overriding flags");
    fb->add_option("--out", fo.out, "report path (default stdout)");

    RegOpts ro;
    auto* rg = app.add_subcommand("regularity", "positivity margin of the defining inequality");
    rg->add_option("--phi", ro.phi, "profile family (class-iv or excluded)");
    rg->add_option("--k1", ro.k1, "first family constant");
    rg->add_option("--k2", ro.k2, "second family constant");
    rg->add_option("--k3", ro.k3, "linear term (excluded family)");
    rg->add_option("--sign", ro.sign, "branch sign, +1 or -1");
    rg->add_option("--b", ro.b, "norm bound to scan");
    rg->add_option("--config", ro.config, "JSON config overriding flags");
    rg->add_option("--out", ro.out, "report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    try {
        if (app.got_subcommand(ve)) return run_verify_example(vo);
        if (app.got_subcommand(cl)) return run_classify(co, expect, tol_s);
        if (app.got_subcommand(sc)) return run_scurvature(so, x_text, y_text);
        if (app.got_subcommand(sa)) return run_series_audit(se);
        if (app.got_subcommand(fb)) return run_fb_check(fo);
        if (app.got_subcommand(rg)) return run_regularity(ro);
        std::fprintf(stderr, "error: no command\n");
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ParamError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const OrderError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const DimensionError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
