#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gfix.hpp"
#include "gfix/digest.hpp"
#include "gfix/io.hpp"

namespace {

using gfix::io::json;

enum ExitCode { kOk = 0, kInputError = 1, kHypothesesFailed = 2, kNotConverged = 3 };

struct RunConfig {
    std::string command;
    std::string space;
    std::string map;
    std::string coeffs;
    std::string out;
    std::string theorem;
    std::string x0;
    std::optional<double> eps;
    std::optional<double> lambda;
    double tol = 1e-12;
    std::size_t max_iter = 1000;
    std::size_t horizon = 32;
    std::size_t depth = 8;
    bool assume_continuous = false;
    bool assume_complete = false;
    bool relaxed_an = false;
};

json input_record(const std::string& spec) {
    if (spec.rfind("example:", 0) == 0) {
        return json{{"source", spec}, {"builtin", true}};
    }
    return json{{"source", spec}, {"sha256", gfix::sha256_hex(gfix::io::read_file(spec))}};
}

gfix::PointIndex parse_x0(const gfix::FiniteGSpace& space, const std::string& text) {
    try {
        return space.index_of(text);
    } catch (const gfix::LookupError&) {
    }
    try {
        std::size_t pos = 0;
        const unsigned long v = std::stoul(text, &pos);
        if (pos == text.size() && v < space.size()) return v;
    } catch (const std::exception&) {
    }
    throw gfix::ParseError("--x0", "x0", "'" + text + "' is neither a point label nor an index of the space");
}

double parse_x0(const gfix::AnalyticGSpace& space, const std::string& text) {
    double v = 0.0;
    try {
        std::size_t pos = 0;
        v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
    } catch (const std::exception&) {
        throw gfix::ParseError("--x0", "x0", "'" + text + "' is not a number");
    }
    gfix::require_point(space, v);
    return v;
}

gfix::CertifyParams certify_params(const RunConfig& cfg, const gfix::io::CoefficientConfig& coeffs) {
    gfix::CertifyParams p;
    p.eps = cfg.eps;
    p.lambda = cfg.lambda;
    p.a = coeffs.a;
    if (p.a && p.a->closed_form()) p.a = p.a->with_horizon(cfg.horizon);
    p.phi = coeffs.phi;
    p.delta = coeffs.delta;
    p.gamma = coeffs.gamma;
    p.theta = coeffs.theta;
    p.lamda = coeffs.lamda;
    p.horizon = cfg.horizon;
    p.depth = cfg.depth;
    p.max_iter = cfg.max_iter;
    p.relaxed_an = cfg.relaxed_an;
    p.assume_continuity = cfg.assume_continuous;
    p.assume_completeness = cfg.assume_complete;
    return p;
}

json validate(const gfix::FiniteGSpace& space, int& code) {
    const gfix::AxiomReport report = gfix::validate_axioms(space);
    code = report.all_hold() ? kOk : kHypothesesFailed;
    return gfix::io::to_json(space, report);
}

json validate(const gfix::AnalyticGSpace& space, int& code) {
    const gfix::SampledAxiomReport sampled = gfix::validate_axioms(space, 3);
    code = sampled.report.all_hold() ? kOk : kHypothesesFailed;
    json out = gfix::io::to_json(sampled.grid, sampled.report);
    out["sampled"] = true;
    out["family"] = std::string(gfix::family_name(space.family()));
    return out;
}

template <gfix::GSpaceLike S>
json chains(const S& space, const RunConfig& cfg) {
    const double threshold = gfix::chainability_threshold(space);
    const double eps = cfg.eps.value_or(threshold);
    json out = gfix::io::to_json(space, gfix::is_chainable(space, eps), threshold);
    out["sampled"] = S::sampled;
    return out;
}

template <gfix::GSpaceLike S, gfix::SelfMapOn<S> M>
json analyze(const S& space, const M& map, const RunConfig& cfg, const gfix::io::CoefficientConfig& coeffs) {
    json out;
    out["lipschitz"] = gfix::io::to_json(space, gfix::lipschitz_constant(space, map));
    json iterated = json::array();
    for (const auto& r : gfix::iterated_lipschitz(space, map, cfg.depth)) {
        iterated.push_back(gfix::io::real(r.value));
    }
    out["iterated_lipschitz"] = std::move(iterated);
    if constexpr (!S::sampled) {
        const auto stab = gfix::eventually_constant(space, map);
        out["eventually_constant_from"] = stab ? json(*stab) : json(nullptr);
    }
    if (cfg.eps) {
        const auto min_lam = gfix::minimal_uniform_lambda(space, map, *cfg.eps);
        json lc{{"eps", *cfg.eps}};
        lc["minimal_lambda"] = min_lam ? json(*min_lam) : json(nullptr);
        if (cfg.lambda) {
            const auto v = gfix::check_local_contractive(space, map, *cfg.eps, *cfg.lambda);
            lc["lambda"] = *cfg.lambda;
            lc["holds"] = v.holds;
            lc["sampled"] = v.sampled;
            if (!v.holds) {
                lc["witness"] = gfix::io::points_json(space, v.witness);
                lc["lhs"] = gfix::io::real(v.lhs);
                lc["rhs"] = gfix::io::real(v.rhs);
            }
        }
        out["local_contraction"] = std::move(lc);
    }
    if (coeffs.a) {
        const gfix::CoefficientSeq a = coeffs.a->with_horizon(cfg.horizon);
        json an{{"series", gfix::io::to_json(gfix::series_converges(a))},
                {"a1", a(1)},
                {"tends_to_zero", std::string(gfix::series_status_name(gfix::tends_to_zero(a)))}};
        const auto v = coeffs.phi ? gfix::check_phi_condition(space, map, a, *coeffs.phi, cfg.depth)
                                  : gfix::check_sequential_condition(space, map, a, cfg.depth);
        an["condition"] = coeffs.phi ? "phi" : "sequential";
        an["holds"] = v.holds;
        an["a1_below_half"] = v.a1_below_half;
        an["sampled"] = v.sampled;
        an["depth"] = v.horizon;
        if (!v.holds && !v.witness.empty()) {
            an["witness"] = gfix::io::points_json(space, v.witness);
            an["witness_n"] = v.witness_n;
            an["lhs"] = gfix::io::real(v.lhs);
            an["rhs"] = gfix::io::real(v.rhs);
        }
        out["coefficients"] = std::move(an);
    }
    if (coeffs.r) {
        const gfix::CoefficientSeq r = coeffs.r->with_horizon(cfg.horizon);
        out["lambda_sequence"] = gfix::io::to_json(cfg.lambda ? gfix::lambda_sequence_check(r, *cfg.lambda)
                                                              : gfix::lambda_sequence_check(r));
        out["product_series"] = gfix::io::to_json(gfix::product_series_check(r));
    }
    return out;
}

template <gfix::GSpaceLike S, gfix::SelfMapOn<S> M>
json solve(const S& space, const std::vector<M>& maps, const std::optional<typename S::point_type>& x0,
           const RunConfig& cfg, int& code) {
    const auto start = gfix::detail::default_start(space, x0);
    json out;
    if (maps.size() == 1) {
        const auto trace = gfix::picard(space, maps.front(), start, cfg.tol, cfg.max_iter);
        out = gfix::io::to_json(space, trace);
        code = trace.converged ? kOk : kNotConverged;
    } else {
        const auto res = gfix::common_fixed_point(space, std::span<const M>(maps), start, cfg.tol, cfg.max_iter);
        out = gfix::io::to_json(space, res.trace);
        out["common_fixed_point"] = res.point ? gfix::io::point_json(space, *res.point) : json(nullptr);
        code = res.point ? kOk : kNotConverged;
    }
    out["tol"] = cfg.tol;
    out["max_iter"] = cfg.max_iter;
    return out;
}

json oracle(const gfix::FiniteGSpace& space, const std::vector<gfix::TabulatedMap>& maps, const RunConfig& cfg) {
    if (maps.size() == 1) {
        json out = gfix::io::to_json(space, gfix::brute_fixed_points(space, maps.front()));
        const auto lip = gfix::brute_lipschitz(space, maps.front());
        out["lipschitz"] = json{{"bounded", lip.bounded}, {"value", gfix::io::real(lip.value)}};
        return out;
    }
    const std::size_t horizon = std::max(cfg.horizon, maps.size());
    json out = gfix::io::to_json(space, gfix::brute_common_fixed_points(space, std::span(maps), horizon));
    out["horizon"] = horizon;
    return out;
}

json oracle(const gfix::AnalyticGSpace&, const std::vector<gfix::AffineMap>&, const RunConfig&) {
    throw gfix::UnsupportedError("oracle: analytic spaces cannot be enumerated");
}

template <gfix::GSpaceLike S, gfix::SelfMapOn<S> M>
json dispatch_with_maps(const S& space, const std::vector<M>& maps, const RunConfig& cfg,
                        const gfix::io::CoefficientConfig& coeffs, int& code) {
    std::optional<typename S::point_type> x0;
    if (!cfg.x0.empty()) x0 = parse_x0(space, cfg.x0);
    if (cfg.command == "analyze") {
        if (maps.size() != 1) throw gfix::DomainError("analyze takes a single map");
        return analyze(space, maps.front(), cfg, coeffs);
    }
    if (cfg.command == "certify") {
        if (cfg.theorem.empty()) throw gfix::ParseError("<command line>", "--theorem", "required for certify");
        const gfix::TheoremId id = gfix::parse_theorem(cfg.theorem);
        const gfix::Certificate cert =
            gfix::certify(space, std::span<const M>(maps), id, certify_params(cfg, coeffs), x0);
        code = cert.valid ? kOk : kHypothesesFailed;
        return gfix::io::to_json(cert);
    }
    if (cfg.command == "solve") return solve(space, maps, x0, cfg, code);
    return oracle(space, maps, cfg);
}

json run(const RunConfig& cfg, int& code) {
    code = kOk;
    json report;
    report["version"] = gfix::kVersion;
    report["command"] = cfg.command;
    json inputs;
    inputs["space"] = input_record(cfg.space);
    const gfix::GSpace space = gfix::io::load_space(cfg.space);

    gfix::io::CoefficientConfig coeffs;
    if (!cfg.coeffs.empty()) {
        inputs["coeffs"] = input_record(cfg.coeffs);
        coeffs = gfix::io::load_coefficients(cfg.coeffs);
    }

    if (cfg.command == "validate") {
        report["result"] = std::visit([&](const auto& s) { return validate(s, code); }, space);
    } else if (cfg.command == "chains") {
        report["result"] = std::visit([&](const auto& s) { return chains(s, cfg); }, space);
    } else {
        if (cfg.map.empty()) throw gfix::ParseError("<command line>", "--map", "required for " + cfg.command);
        inputs["map"] = input_record(cfg.map);
        const gfix::io::MapFamily maps = gfix::io::load_maps(space, cfg.map);
        if (const auto* fs = std::get_if<gfix::FiniteGSpace>(&space)) {
            report["result"] =
                dispatch_with_maps(*fs, std::get<std::vector<gfix::TabulatedMap>>(maps), cfg, coeffs, code);
        } else {
            report["result"] = dispatch_with_maps(std::get<gfix::AnalyticGSpace>(space),
                                                  std::get<std::vector<gfix::AffineMap>>(maps), cfg, coeffs, code);
        }
    }
    report["inputs"] = std::move(inputs);
    report["exit_code"] = code;
    return report;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fixed-point certification toolkit for G-metric type spaces", "gfix"};
    app.set_version_flag("--version", gfix::kVersion);
    app.require_subcommand(1);

    RunConfig cfg;
    const auto add_common = [&](CLI::App* sub, bool needs_map) {
        sub->add_option("--space", cfg.space, "space JSON file or example:NAME")->required();
        auto* map = sub->add_option("--map", cfg.map, "map JSON file or example:NAME");
        if (needs_map) map->required();
        sub->add_option("--out", cfg.out, "write the report here instead of stdout");
        sub->add_option("--tol", cfg.tol, "stopping tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--max-iter", cfg.max_iter, "iteration budget")->check(CLI::PositiveNumber);
        sub->add_option("--horizon", cfg.horizon, "series and lambda-sequence horizon")->check(CLI::PositiveNumber);
        sub->add_option("--depth", cfg.depth, "iterate powers checked pointwise")->check(CLI::PositiveNumber);
        sub->add_option("--coeffs", cfg.coeffs, "coefficient JSON file");
        sub->add_option("--eps", cfg.eps, "epsilon")->check(CLI::PositiveNumber);
        sub->add_option("--lambda", cfg.lambda, "lambda")->check(CLI::Range(0.0, 1.0));
        sub->add_option("--x0", cfg.x0, "start point (label, index or real)");
    };
    add_common(app.add_subcommand("validate", "check the axioms G1-G5 and G5'"), false);
    add_common(app.add_subcommand("chains", "eps-chainability and its threshold"), false);
    add_common(app.add_subcommand("analyze", "Lipschitz, contraction and coefficient checks"), true);
    auto* cert = app.add_subcommand("certify", "assemble a theorem certificate");
    add_common(cert, true);
    cert->add_option("--theorem", cfg.theorem, "theorem id, e.g. ULC_CHAINABLE")->required();
    cert->add_flag("--assume-continuous", cfg.assume_continuous, "declare T sequentially/orbitally continuous");
    cert->add_flag("--assume-complete", cfg.assume_complete, "declare the space G-complete");
    cert->add_flag("--relaxed-an", cfg.relaxed_an, "accept a_n -> 0 in place of a summable sequence");
    add_common(app.add_subcommand("solve", "Picard iteration"), true);
    add_common(app.add_subcommand("oracle", "brute-force fixed points"), true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    int code = kOk;
    json report;
    try {
        report = run(cfg, code);
    } catch (const gfix::Error& e) {
        std::cerr << "gfix: " << e.what() << '\n';
        return kInputError;
    } catch (const gfix::io::json::exception& e) {
        std::cerr << "gfix: " << e.what() << '\n';
        return kInputError;
    }

    const std::string text = report.dump(2) + "\n";
    if (cfg.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(cfg.out, std::ios::binary);
        if (!out) {
            std::cerr << "gfix: cannot write " << cfg.out << '\n';
            return kInputError;
        }
        out << text;
    }
    return code;
}
