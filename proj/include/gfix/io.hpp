#pragma once

// JSON input parsing and report serialization (nlohmann::json).

#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gfix/analysis.hpp"
#include "gfix/certify.hpp"
#include "gfix/chains.hpp"
#include "gfix/coefficients.hpp"
#include "gfix/error.hpp"
#include "gfix/gspace.hpp"
#include "gfix/maps.hpp"
#include "gfix/oracle.hpp"
#include "gfix/solver.hpp"

namespace gfix::io {

using nlohmann::json;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError(path, "<file>", "cannot open file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(source, "<document>", e.what());
    }
}

namespace detail {

class Fields {
public:
    Fields(const json& obj, std::string source, std::string prefix = {})
        : obj_(obj), source_(std::move(source)), prefix_(std::move(prefix)) {
        if (!obj_.is_object()) {
            throw ParseError(source_, prefix_.empty() ? "<document>" : prefix_, "expected a JSON object");
        }
    }

    std::string path(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json& at(const std::string& key) const {
        if (!obj_.contains(key)) throw ParseError(source_, path(key), "missing");
        return obj_.at(key);
    }

    double number(const std::string& key) const {
        const json& v = at(key);
        if (!v.is_number()) throw ParseError(source_, path(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ParseError(source_, path(key), "expected a finite number");
        return d;
    }

    double number_or(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }

    std::size_t count(const std::string& key) const {
        const json& v = at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw ParseError(source_, path(key), "expected a nonnegative integer");
        }
        return v.get<std::size_t>();
    }

    std::size_t count_or(const std::string& key, std::size_t fallback) const { return has(key) ? count(key) : fallback; }

    std::string text(const std::string& key) const {
        const json& v = at(key);
        if (!v.is_string()) throw ParseError(source_, path(key), "expected a string");
        return v.get<std::string>();
    }

    const json& array(const std::string& key) const {
        const json& v = at(key);
        if (!v.is_array()) throw ParseError(source_, path(key), "expected an array");
        return v;
    }

    const std::string& source() const { return source_; }

private:
    const json& obj_;
    std::string source_;
    std::string prefix_;
};

inline std::string element(const std::string& field, std::size_t i) { return field + "[" + std::to_string(i) + "]"; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Spaces

inline GSpace parse_space(const json& doc, const std::string& source) {
    const detail::Fields f(doc, source);
    const std::string kind = f.text("kind");
    if (kind == "example") {
        try {
            return make_example(f.text("name"));
        } catch (const Error& e) {
            throw ParseError(source, "name", e.what());
        }
    }
    if (kind == "analytic") {
        const std::string family = f.text("family");
        AnalyticFamily fam;
        try {
            fam = parse_family(family);
        } catch (const Error& e) {
            throw ParseError(source, "family", e.what());
        }
        const double lo = f.number("lo");
        const double hi = f.number("hi");
        const std::size_t grid_n = f.count_or("grid_n", examples::kDefaultGrid);
        try {
            return AnalyticGSpace(fam, lo, hi, grid_n);
        } catch (const DomainError& e) {
            throw ParseError(source, "lo/hi/grid_n", e.what());
        }
    }
    if (kind != "finite") {
        throw ParseError(source, "kind", "expected 'finite', 'analytic' or 'example', got '" + kind + "'");
    }
    const json& pts = f.array("points");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].is_string()) {
            labels.push_back(pts[i].get<std::string>());
        } else if (pts[i].is_number_integer()) {
            labels.push_back(std::to_string(pts[i].get<long long>()));
        } else {
            throw ParseError(source, detail::element("points", i), "expected a string or integer label");
        }
    }
    const double K = f.number("K");
    if (K < 1.0) {
        throw ParseError(source, "K", "K must be >= 1, got " + format_real(K));
    }
    const json& triples = f.array("triples");
    std::vector<FiniteGSpace::Entry> entries;
    for (std::size_t t = 0; t < triples.size(); ++t) {
        const json& row = triples[t];
        const std::string field = detail::element("triples", t);
        if (!row.is_array() || row.size() != 4) {
            throw ParseError(source, field, "expected [i, j, k, value]");
        }
        for (std::size_t c = 0; c < 3; ++c) {
            if (!row[c].is_number_integer() || row[c].get<long long>() < 0) {
                throw ParseError(source, field, "indices must be nonnegative integers");
            }
        }
        if (!row[3].is_number()) {
            throw ParseError(source, field, "value must be a number");
        }
        entries.push_back({row[0].get<PointIndex>(), row[1].get<PointIndex>(), row[2].get<PointIndex>(),
                           row[3].get<double>()});
    }
    try {
        return FiniteGSpace(std::move(labels), K, entries);
    } catch (const DomainError& e) {
        throw ParseError(source, "triples", e.what());
    } catch (const LookupError& e) {
        throw ParseError(source, "triples", e.what());
    }
}

// PATH, or example:NAME for a builtin space.
inline GSpace load_space(const std::string& spec) {
    if (spec.rfind("example:", 0) == 0) {
        try {
            return make_example(spec.substr(8));
        } catch (const Error& e) {
            throw ParseError(spec, "name", e.what());
        }
    }
    return parse_space(parse_json_text(read_file(spec), spec), spec);
}

// ---------------------------------------------------------------------------
// Maps

namespace detail {

inline PointIndex parse_point_ref(const FiniteGSpace& space, const json& v, const std::string& source,
                                  const std::string& field) {
    if (v.is_string()) {
        try {
            return space.index_of(v.get<std::string>());
        } catch (const LookupError& e) {
            throw ParseError(source, field, e.what());
        }
    }
    if (v.is_number_integer() && v.get<long long>() >= 0 && v.get<std::size_t>() < space.size()) {
        return v.get<PointIndex>();
    }
    throw ParseError(source, field, "expected a point label or an index below " + std::to_string(space.size()));
}

inline void parse_finite_maps(const FiniteGSpace& space, const json& doc, const std::string& source,
                              const std::string& prefix, std::vector<TabulatedMap>& out) {
    const Fields f(doc, source, prefix);
    const std::string kind = f.text("kind");
    std::string label = f.has("label") ? f.text("label") : "T";
    if (kind == "family") {
        const json& maps = f.array("maps");
        if (maps.empty()) throw ParseError(source, f.path("maps"), "empty family");
        for (std::size_t i = 0; i < maps.size(); ++i) {
            parse_finite_maps(space, maps[i], source, element(f.path("maps"), i), out);
            if (out.back().label == "T") out.back().label = "T_" + std::to_string(i + 1);
        }
        return;
    }
    if (kind == "identity") {
        TabulatedMap m = identity_map(space.size());
        m.label = label == "T" ? "id" : label;
        out.push_back(std::move(m));
        return;
    }
    if (kind == "constant") {
        const PointIndex v = parse_point_ref(space, f.at("value"), source, f.path("value"));
        TabulatedMap m = constant_map(space.size(), v);
        if (label != "T") m.label = label;
        out.push_back(std::move(m));
        return;
    }
    if (kind != "tabulated") {
        throw ParseError(source, f.path("kind"),
                         "expected 'tabulated', 'identity', 'constant' or 'family' for a finite space, got '" + kind + "'");
    }
    const json& image = f.array("image");
    if (image.size() != space.size()) {
        throw ParseError(source, f.path("image"),
                         "has " + std::to_string(image.size()) + " entries, the space has " + std::to_string(space.size()));
    }
    TabulatedMap m{{}, label};
    for (std::size_t i = 0; i < image.size(); ++i) {
        m.image.push_back(parse_point_ref(space, image[i], source, element(f.path("image"), i)));
    }
    out.push_back(std::move(m));
}

inline void parse_affine_maps(const AnalyticGSpace& space, const json& doc, const std::string& source,
                              const std::string& prefix, std::vector<AffineMap>& out) {
    const Fields f(doc, source, prefix);
    const std::string kind = f.text("kind");
    std::string label = f.has("label") ? f.text("label") : "T";
    if (kind == "family") {
        const json& maps = f.array("maps");
        if (maps.empty()) throw ParseError(source, f.path("maps"), "empty family");
        for (std::size_t i = 0; i < maps.size(); ++i) {
            parse_affine_maps(space, maps[i], source, element(f.path("maps"), i), out);
            if (out.back().label == "T") out.back().label = "T_" + std::to_string(i + 1);
        }
        return;
    }
    AffineMap m{1.0, 0.0, label};
    if (kind == "affine") {
        m.slope = f.number("slope");
        m.offset = f.number_or("offset", 0.0);
    } else if (kind == "identity") {
        if (label == "T") m.label = "id";
    } else if (kind == "constant") {
        m.slope = 0.0;
        m.offset = f.number("value");
    } else {
        throw ParseError(source, f.path("kind"),
                         "expected 'affine', 'identity', 'constant' or 'family' for an analytic space, got '" + kind + "'");
    }
    try {
        require_compatible(space, m);
    } catch (const DomainError& e) {
        throw ParseError(source, f.path("slope"), e.what());
    }
    out.push_back(std::move(m));
}

}  // namespace detail

using MapFamily = std::variant<std::vector<TabulatedMap>, std::vector<AffineMap>>;

inline MapFamily parse_maps(const GSpace& space, const json& doc, const std::string& source) {
    if (const auto* fs = std::get_if<FiniteGSpace>(&space)) {
        std::vector<TabulatedMap> out;
        detail::parse_finite_maps(*fs, doc, source, {}, out);
        return out;
    }
    std::vector<AffineMap> out;
    detail::parse_affine_maps(std::get<AnalyticGSpace>(space), doc, source, {}, out);
    return out;
}

// PATH, or example:NAME (two_point_map, three_point_map, sixteenth, identity).
inline MapFamily load_maps(const GSpace& space, const std::string& spec) {
    if (spec.rfind("example:", 0) == 0) {
        const std::string name = spec.substr(8);
        if (const auto* fs = std::get_if<FiniteGSpace>(&space)) {
            TabulatedMap m;
            if (name == "two_point_map") {
                m = examples::two_point_map();
            } else if (name == "three_point_map") {
                m = examples::three_point_map();
            } else if (name == "identity") {
                m = identity_map(fs->size());
            } else {
                throw ParseError(spec, "name", "unknown finite example map '" + name + "'");
            }
            try {
                require_compatible(*fs, m);
            } catch (const DomainError& e) {
                throw ParseError(spec, "name", e.what());
            }
            return std::vector<TabulatedMap>{m};
        }
        AffineMap m;
        if (name == "sixteenth") {
            m = examples::sixteenth_map();
        } else if (name == "identity") {
            m = {1.0, 0.0, "id"};
        } else {
            throw ParseError(spec, "name", "unknown analytic example map '" + name + "'");
        }
        try {
            require_compatible(std::get<AnalyticGSpace>(space), m);
        } catch (const DomainError& e) {
            throw ParseError(spec, "name", e.what());
        }
        return std::vector<AffineMap>{m};
    }
    return parse_maps(space, parse_json_text(read_file(spec), spec), spec);
}

// ---------------------------------------------------------------------------
// Coefficients

inline CoefficientSeq parse_sequence(const json& doc, const std::string& source, const std::string& prefix) {
    const detail::Fields f(doc, source, prefix);
    const std::string family = f.text("family");
    const std::size_t horizon = f.count_or("horizon", CoefficientSeq::kDefaultHorizon);
    try {
        if (family == "geometric") return CoefficientSeq::geometric(f.number("q"), f.number("rho"), horizon);
        if (family == "inv-sq-shifted") return CoefficientSeq::inv_sq_shifted(f.number_or("c", 1.0), horizon);
        if (family == "harmonic") return CoefficientSeq::harmonic(horizon);
        if (family == "constant") return CoefficientSeq::constant(f.number("value"), horizon);
        if (family == "tabulated") {
            const json& values = f.array("values");
            std::vector<double> v;
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (!values[i].is_number()) {
                    throw ParseError(source, detail::element(f.path("values"), i), "expected a number");
                }
                v.push_back(values[i].get<double>());
            }
            return CoefficientSeq::tabulated(std::move(v));
        }
    } catch (const DomainError& e) {
        throw ParseError(source, prefix, e.what());
    }
    throw ParseError(source, f.path("family"),
                     "expected geometric, inv-sq-shifted, harmonic, constant or tabulated, got '" + family + "'");
}

inline CoefficientTensor parse_tensor(const json& doc, const std::string& source, const std::string& prefix) {
    const detail::Fields f(doc, source, prefix);
    const std::string family = f.text("family");
    try {
        if (family == "constant") return CoefficientTensor::constant(f.number("value"));
        if (family == "tabulated") {
            const json& rows = f.array("entries");
            std::vector<CoefficientTensor::Entry> entries;
            for (std::size_t t = 0; t < rows.size(); ++t) {
                const json& row = rows[t];
                const std::string field = detail::element(f.path("entries"), t);
                if (!row.is_array() || row.size() != 4 || !row[0].is_number_integer() ||
                    !row[1].is_number_integer() || !row[2].is_number_integer() || !row[3].is_number()) {
                    throw ParseError(source, field, "expected [i, j, k, value] with integer indices");
                }
                if (row[0].get<long long>() < 1 || row[1].get<long long>() < 1 || row[2].get<long long>() < 1) {
                    throw ParseError(source, field, "tensor indices start at 1");
                }
                entries.push_back({row[0].get<std::size_t>(), row[1].get<std::size_t>(), row[2].get<std::size_t>(),
                                   row[3].get<double>()});
            }
            return CoefficientTensor::tabulated(entries);
        }
    } catch (const DomainError& e) {
        throw ParseError(source, prefix, e.what());
    }
    throw ParseError(source, f.path("family"), "expected constant or tabulated, got '" + family + "'");
}

struct CoefficientConfig {
    std::optional<CoefficientSeq> a;
    std::optional<CoefficientSeq> r;
    std::optional<PhiFunction> phi;
    std::optional<CoefficientTensor> delta;
    std::optional<CoefficientTensor> gamma;
    std::optional<CoefficientTensor> theta;
    std::optional<CoefficientTensor> lamda;
};

inline CoefficientConfig parse_coefficients(const json& doc, const std::string& source) {
    const detail::Fields f(doc, source);
    CoefficientConfig c;
    for (const auto& [key, value] : doc.items()) {
        if (key == "a") {
            c.a = parse_sequence(value, source, key);
        } else if (key == "r") {
            c.r = parse_sequence(value, source, key);
        } else if (key == "phi") {
            const detail::Fields pf(value, source, key);
            try {
                c.phi = PhiFunction(pf.number("s"), pf.number_or("c", 1.0));
            } catch (const DomainError& e) {
                throw ParseError(source, key, e.what());
            }
        } else if (key == "delta") {
            c.delta = parse_tensor(value, source, key);
        } else if (key == "gamma") {
            c.gamma = parse_tensor(value, source, key);
        } else if (key == "theta") {
            c.theta = parse_tensor(value, source, key);
        } else if (key == "lambda") {
            c.lamda = parse_tensor(value, source, key);
        } else {
            throw ParseError(source, key, "unknown coefficient key");
        }
    }
    return c;
}

inline CoefficientConfig load_coefficients(const std::string& path) {
    return parse_coefficients(parse_json_text(read_file(path), path), path);
}

// ---------------------------------------------------------------------------
// Reports

inline json real(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

inline json point_json(const FiniteGSpace& space, PointIndex p) { return space.label(p); }
inline json point_json(const AnalyticGSpace&, double x) { return x; }

template <GSpaceLike S>
json points_json(const S& space, const std::vector<typename S::point_type>& pts) {
    json out = json::array();
    for (const auto& p : pts) out.push_back(point_json(space, p));
    return out;
}

inline json to_json(const FiniteGSpace& space, const AxiomReport& report) {
    json axioms = json::object();
    for (Axiom a : kAllAxioms) {
        const AxiomVerdict& v = report[a];
        json entry{{"holds", v.holds}};
        if (!v.holds) {
            entry["witness"] = points_json(space, v.witness);
            entry["lhs"] = real(v.lhs);
            entry["rhs"] = real(v.rhs);
        }
        axioms[std::string(axiom_name(a))] = std::move(entry);
    }
    return json{{"axioms", std::move(axioms)},
                {"all_hold", report.all_hold()},
                {"g5_chain_cutoff", report.g5_chain_cutoff},
                {"K", space.k()},
                {"points", space.size()}};
}

template <GSpaceLike S>
json to_json(const S& space, const ChainabilityVerdict<typename S::point_type>& v,
             std::optional<GValue> threshold = std::nullopt) {
    json out{{"chainable", v.chainable}, {"epsilon", real(v.epsilon)}, {"max_degree", v.max_degree}};
    out["threshold"] = threshold ? real(*threshold) : json(nullptr);
    json witnesses = json::array();
    for (const auto& [pair, chain] : v.witness_chains) {
        witnesses.push_back({{"from", point_json(space, pair.first)},
                             {"to", point_json(space, pair.second)},
                             {"degree", chain.degree()},
                             {"nodes", points_json(space, chain.nodes)}});
    }
    out["witnesses"] = std::move(witnesses);
    if (v.blocking_pair) {
        out["blocking_pair"] = json::array({point_json(space, v.blocking_pair->first),
                                            point_json(space, v.blocking_pair->second)});
    }
    return out;
}

template <GSpaceLike S>
json to_json(const S& space, const LipschitzResult<typename S::point_type>& r) {
    return json{{"bounded", r.bounded},
                {"value", real(r.value)},
                {"witness", points_json(space, r.witness)},
                {"sampled", r.sampled}};
}

template <GSpaceLike S>
json to_json(const S& space, const IterationTrace<typename S::point_type>& t) {
    json steps = json::array();
    for (double s : t.steps) steps.push_back(real(s));
    return json{{"points", points_json(space, t.points)},
                {"steps", std::move(steps)},
                {"residual", real(t.residual)},
                {"converged", t.converged},
                {"iterations", t.iterations},
                {"limit", point_json(space, t.last())}};
}

inline json to_json(const SeriesVerdict& v) {
    json out{{"status", series_status_name(v.status)}, {"partial_sum", real(v.partial_sum)}, {"reason", v.reason}};
    out["ratio"] = v.ratio ? real(*v.ratio) : json(nullptr);
    return out;
}

inline json to_json(const LambdaVerdict& v) {
    json out{{"certified", v.certified},
             {"lambda", real(v.lambda)},
             {"n_lambda", v.n_lambda},
             {"horizon", v.horizon},
             {"non_increasing", v.non_increasing},
             {"sampled", v.sampled}};
    if (v.witness_L) out["witness_L"] = *v.witness_L;
    if (v.witness_k) out["witness_k"] = *v.witness_k;
    return out;
}

inline json to_json(const ProductVerdict& v) {
    return json{{"series", to_json(v.series)}, {"limsup_surrogate", real(v.limsup_surrogate)}};
}

inline json to_json(const Certificate& c, std::size_t bound_samples = 21) {
    json hyps = json::array();
    for (const Hypothesis& h : c.hypotheses) {
        hyps.push_back({{"name", h.name},
                        {"holds", h.holds},
                        {"assumed", h.assumed},
                        {"sampled", h.sampled},
                        {"detail", h.detail}});
    }
    json bound = json::array();
    for (std::size_t m = 0; m < bound_samples; ++m) {
        bound.push_back({{"m", m}, {"value", real(c.bound(m))}});
    }
    json params = json::object();
    for (const auto& [k, v] : c.parameters) params[k] = real(v);
    return json{{"theorem", theorem_name(c.theorem)},
                {"valid", c.valid},
                {"sampled", c.sampled},
                {"horizon", c.horizon},
                {"hypotheses", std::move(hyps)},
                {"bound_quantity", c.bound_quantity},
                {"bound", std::move(bound)},
                {"parameters", std::move(params)},
                {"notes", c.notes}};
}

inline json to_json(const FiniteGSpace& space, const OracleResult& r) {
    json pts = json::array();
    for (PointIndex p : r.fixed_points) pts.push_back(space.label(p));
    return json{{"fixed_points", std::move(pts)}, {"unique", r.unique}, {"method", r.method}};
}

}  // namespace gfix::io
