#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gfix.hpp"
#include "gfix/io.hpp"
#include "support.hpp"

using namespace gfix;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && pass) {
            pass = false;
            detail = what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool unique_fixed_point_is(const FiniteGSpace& s, const TabulatedMap& m, PointIndex p) {
    const OracleResult o = brute_fixed_points(s, m);
    return o.unique && *o.fixed_points.begin() == p;
}

Outcome discrete_space() {
    Outcome o;
    const auto t0 = Clock::now();
    for (std::size_t n : {2u, 3u, 5u}) {
        const FiniteGSpace s = examples::discrete(n);
        o.require(chainability_threshold(s) == 1.0, "threshold of discrete(" + std::to_string(n) + ") is not 1");
        o.require(is_chainable(s, 1.0).chainable, "discrete(" + std::to_string(n) + ") not 1-chainable");
        o.require(!is_chainable(s, 0.5).chainable, "discrete(" + std::to_string(n) + ") is 0.5-chainable");
    }
    const double dt = seconds_since(t0);
    o.require(dt < 1.0, "took " + std::to_string(dt) + " s");
    if (o.pass) o.detail = "threshold 1 for n = 2, 3, 5; not 0.5-chainable";
    return o;
}

Outcome finite_example(const FiniteGSpace& s, const TabulatedMap& m, PointIndex x0, double expected_lambda,
                       bool check_chain) {
    Outcome o;
    const auto t0 = Clock::now();
    o.require(validate_axioms(s).all_hold(), "axioms fail");
    o.require(s.k() == 1.0, "K != 1");
    if (check_chain) o.require(is_chainable(s, 2.0).chainable, "not 2-chainable");
    const auto lam = minimal_uniform_lambda(s, m, 4.0);
    o.require(lam.has_value(), "no uniform lambda at eps 4");
    if (lam) {
        o.require(std::abs(*lam - expected_lambda) <= 1e-12, "minimal lambda " + format_real(*lam));
    }
    o.require(check_local_contractive(s, m, 4.0, 0.5).holds, "not (4, 0.5)-uniformly locally contractive");
    CertifyParams p;
    p.eps = 4.0;
    p.lambda = 0.5;
    const Certificate c = certify(s, m, TheoremId::UlcChainable, p, x0);
    o.require(c.valid, "ULC_CHAINABLE certificate invalid");
    const auto trace = picard(s, m, x0, 1e-12, 100);
    o.require(trace.converged && trace.last() == 0, "picard does not reach 0");
    o.require(unique_fixed_point_is(s, m, 0), "oracle does not give unique fixed point 0");
    const double dt = seconds_since(t0);
    o.require(dt < 1.0, "took " + std::to_string(dt) + " s");
    if (o.pass) {
        o.detail = "lambda_min = " + format_real(*lam) + ", certificate valid, fixed point 0 (picard " +
                   std::to_string(trace.iterations) + " steps)";
    }
    return o;
}

Outcome interval_example() {
    Outcome o;
    const auto t0 = Clock::now();
    const AnalyticGSpace iv = examples::interval_maxval();
    o.require(iv.sample().size() == 257, "grid is not 257 points");
    const auto a = CoefficientSeq::inv_sq_shifted(1.0);
    o.require(check_phi_condition(iv, examples::sixteenth_map(), a, PhiFunction::sqrt(), 6).holds,
              "phi condition fails on the grid");
    o.require(series_converges(a).status == SeriesStatus::Convergent, "sum a_n not certified");
    o.require(a(1) == 1.0 / 9.0 && a(1) < 0.5, "a_1 != 1/9");
    const auto trace = picard(iv, examples::sixteenth_map(), 1.0, 1e-12, 1000);
    o.require(trace.converged, "picard did not converge");
    o.require(std::abs(trace.last()) <= 1e-12, "|x| > 1e-12");
    o.require(trace.iterations <= 11, "needed " + std::to_string(trace.iterations) + " iterations");
    const double dt = seconds_since(t0);
    o.require(dt < 1.0, "took " + std::to_string(dt) + " s");
    if (o.pass) {
        o.detail = "phi condition holds for n <= 6, a_1 = 1/9, |x| = " + format_real(std::abs(trace.last())) +
                   " after " + std::to_string(trace.iterations) + " iterations";
    }
    return o;
}

Outcome lambda_sequence() {
    Outcome o;
    const auto r = CoefficientSeq::geometric(1.0, 0.5);
    const LambdaVerdict v = lambda_sequence_check(r);
    o.require(v.certified, "not certified");
    o.require(v.lambda == 0.5, "lambda = " + format_real(v.lambda));
    o.require(v.n_lambda == 1, "n(lambda) = " + std::to_string(v.n_lambda));
    o.require(v.horizon == 64, "horizon " + std::to_string(v.horizon));
    // links G(r_i, r_{i+1}, r_{i+1}) under the max metric
    const std::vector<double> t = r.terms();
    for (std::size_t L = v.n_lambda + 1; L <= 64 && o.pass; ++L) {
        double link = 0.0;
        for (std::size_t i = 1; i + 1 <= L; ++i) link += std::max(t[i - 1], t[i]);
        o.require(link <= v.lambda * static_cast<double>(L), "replay fails at L = " + std::to_string(L));
    }
    if (o.pass) o.detail = "lambda = 0.5, n(lambda) = 1, replay passes for L <= 64";
    return o;
}

Outcome bound_domination() {
    Outcome o;
    struct Case {
        const char* name;
        FiniteGSpace space;
        TabulatedMap map;
        PointIndex x0;
    };
    const std::vector<Case> cases{{"two_point", examples::two_point(), examples::two_point_map(), 1},
                                  {"three_point", examples::three_point(), examples::three_point_map(), 2}};
    std::ostringstream detail;
    for (const Case& c : cases) {
        CertifyParams p;
        p.eps = 4.0;
        p.lambda = 0.5;
        const Certificate cert = certify(c.space, c.map, TheoremId::UlcChainable, p, c.x0);
        o.require(cert.valid, std::string(c.name) + ": certificate invalid");
        if (!cert.valid) continue;
        const double lam = cert.parameters.at("lambda");
        const double K = cert.parameters.at("K");
        const auto n_deg = static_cast<std::size_t>(cert.parameters.at("n_deg"));
        const double eps = cert.parameters.at("eps");
        const PointIndex star = *brute_fixed_points(c.space, c.map).fixed_points.begin();
        const auto orbit = picard_orbit(c.space, c.map, c.x0, 21);
        for (std::size_t m = 0; m <= 20; ++m) {
            const double err = c.space.g(orbit[m], star, star);
            const double b = bound_ulc(lam, K, n_deg, eps, m);
            o.require(err <= b, std::string(c.name) + ": m = " + std::to_string(m) + " error " + format_real(err) +
                                    " > bound " + format_real(b));
        }
        detail << c.name << " (n_deg " << n_deg << ", bound_0 " << format_real(bound_ulc(lam, K, n_deg, eps, 0))
               << ") ";
    }
    if (o.pass) o.detail = detail.str() + "dominated for m <= 20";
    return o;
}

struct Corpus {
    FiniteGSpace space;
    TabulatedMap map;
    std::vector<TabulatedMap> family;  // only for K = 1 spaces
};

std::vector<Corpus> random_corpus(std::size_t count) {
    std::mt19937_64 rng(20240601);
    std::vector<Corpus> out;
    for (std::size_t i = 0; i < count; ++i) {
        const bool metric = i % 4 == 0;
        FiniteGSpace s = testing::random_space(rng, 6, metric);
        TabulatedMap m = testing::random_map(rng, s.size());
        std::vector<TabulatedMap> fam;
        if (s.k() == 1.0) {
            fam.push_back(m);
            fam.push_back(std::bernoulli_distribution(0.5)(rng) ? m : testing::random_map(rng, s.size()));
        }
        out.push_back({std::move(s), std::move(m), std::move(fam)});
    }
    return out;
}

Outcome oracle_equivalence(const std::vector<Corpus>& corpus) {
    Outcome o;
    std::size_t converged = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const Corpus& c = corpus[i];
        const OracleResult fixed = brute_fixed_points(c.space, c.map);
        for (PointIndex x0 = 0; x0 < c.space.size(); ++x0) {
            const auto t = picard(c.space, c.map, x0, 1e-12, 100);
            if (!t.converged) continue;
            ++converged;
            o.require(fixed.fixed_points.count(t.last()) == 1,
                      "instance " + std::to_string(i) + ": picard limit is not a fixed point");
        }
        const auto lip = lipschitz_constant(c.space, c.map);
        const OracleLipschitz ref = brute_lipschitz(c.space, c.map);
        o.require(lip.bounded == ref.bounded, "instance " + std::to_string(i) + ": boundedness differs");
        if (lip.bounded && ref.bounded) {
            o.require(std::abs(lip.value - ref.value) <= 1e-12,
                      "instance " + std::to_string(i) + ": Lip " + format_real(lip.value) + " vs " +
                          format_real(ref.value));
        }
    }
    if (o.pass) {
        o.detail = std::to_string(corpus.size()) + " instances, " + std::to_string(converged) +
                   " converged runs, all limits fixed; Lipschitz constants agree";
    }
    return o;
}

Outcome soundness(const std::vector<Corpus>& corpus) {
    Outcome o;
    std::mt19937_64 rng(77);
    const std::vector<double> grid{0.05, 0.1, 0.2, 0.3};
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    std::map<TheoremId, std::size_t> valid;
    std::size_t attempted = 0;
    std::size_t violations = 0;
    auto judge = [&](const Certificate& c, const OracleResult& oracle, std::size_t i) {
        ++attempted;
        if (!c.valid) return;
        ++valid[c.theorem];
        if (!oracle.unique) {
            ++violations;
            o.require(false, std::string(theorem_name(c.theorem)) + " valid on instance " + std::to_string(i) +
                                 " without a unique fixed point");
        }
    };

    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const Corpus& c = corpus[i];
        const FiniteGSpace& s = c.space;
        const OracleResult oracle = brute_fixed_points(s, c.map);

        CertifyParams base;
        base.a = CoefficientSeq::geometric(0.8, 0.5);
        base.phi = PhiFunction::sqrt();
        base.delta = CoefficientTensor::constant(grid[pick(rng)]);
        base.gamma = CoefficientTensor::constant(grid[pick(rng)]);
        for (TheoremId id : kAllTheorems) {
            if (is_family_theorem(id) || id == TheoremId::UlcChainable) continue;
            judge(certify(s, c.map, id, base), oracle, i);
        }
        if (s.size() >= 2) {
            const double eps = 2.0 * chainability_threshold(s);
            if (const auto lam = minimal_uniform_lambda(s, c.map, eps)) {
                CertifyParams p;
                p.eps = eps;
                p.lambda = *lam;
                judge(certify(s, c.map, TheoremId::UlcChainable, p), oracle, i);
            }
        }
        if (!c.family.empty()) {
            const std::span<const TabulatedMap> fam(c.family);
            const OracleResult common = brute_common_fixed_points(s, fam, c.family.size());
            CertifyParams p;
            p.delta = CoefficientTensor::constant(0.1);
            p.theta = CoefficientTensor::constant(0.05);
            p.lamda = CoefficientTensor::constant(0.05);
            judge(certify(s, fam, TheoremId::Common, p), common, i);
            p.delta = CoefficientTensor::constant(0.01);
            p.theta = CoefficientTensor::constant(0.001);
            p.lamda = CoefficientTensor::constant(0.001);
            p.phi = PhiFunction::sqrt();
            judge(certify(s, fam, TheoremId::CommonPhi, p), common, i);
        }
    }
    std::size_t total = 0;
    std::string counts;
    for (const auto& [id, n] : valid) {
        total += n;
        counts += std::string(counts.empty() ? "" : ", ") + std::string(theorem_name(id)) + " " + std::to_string(n);
    }
    o.require(total > 0, "no certificate was ever valid");
    if (o.pass) {
        o.detail = std::to_string(attempted) + " certificates, " + std::to_string(total) + " valid (" + counts +
                   "), " + std::to_string(violations) + " violations";
    }
    return o;
}

Outcome reductions() {
    Outcome o;
    std::mt19937_64 rng(91);
    std::size_t agree = 0;
    std::size_t holds = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const FiniteGSpace s = testing::random_space(rng);
        const TabulatedMap m = testing::random_map(rng, s.size());
        const auto a = CoefficientSeq::geometric(std::uniform_real_distribution<double>(0.05, 2.0)(rng), 0.5);
        const bool seq = check_sequential_condition(s, m, a, 4).holds;
        const bool phi = check_phi_condition(s, m, a, PhiFunction(1.0, 1.0), 4).holds;
        o.require(seq == phi, "verdicts differ on instance " + std::to_string(trial));
        if (seq == phi) ++agree;
        if (seq) ++holds;
    }
    const auto a = CoefficientSeq::inv_sq_shifted(1.0);
    for (std::size_t n = 1; n <= 10; ++n) {
        for (std::size_t m = 1; m <= 10; ++m) {
            const double seq = bound_seq_an(a, 1.75, n, m);
            const double phi = bound_phi_an(a, PhiFunction(1.0, 1.0), 1.75, n, m);
            o.require(std::abs(seq - phi) <= 1e-12, "bounds differ at n = " + std::to_string(n) + ", m = " +
                                                        std::to_string(m));
        }
    }
    if (o.pass) {
        o.detail = std::to_string(agree) + "/50 verdicts agree (" + std::to_string(holds) +
                   " hold); bounds equal for n, m <= 10";
    }
    return o;
}

Axiom axiom_named(const std::string& name) {
    for (Axiom a : kAllAxioms) {
        if (axiom_name(a) == name) return a;
    }
    throw LookupError("no axiom named " + name);
}

Outcome golden_tables() {
    Outcome o;
    std::string seen;
    for (const char* file : {"g1_nonzero_diagonal.json", "g2_zero_separation.json", "g3_rectangle.json",
                             "g5prime_triangle.json", "g5_polygon.json"}) {
        const std::string path = std::string(GFIX_GOLDEN_DIR) + "/" + file;
        const io::json doc = io::parse_json_text(io::read_file(path), path);
        const GSpace parsed = io::parse_space(doc, path);
        const FiniteGSpace& s = std::get<FiniteGSpace>(parsed);
        const io::json& expect = doc.at("expect");
        const std::string name = expect.at("axiom").get<std::string>();
        const AxiomReport report = validate_axioms(s);
        const AxiomVerdict& v = report[axiom_named(name)];
        o.require(!v.holds, std::string(file) + ": " + name + " not detected");
        std::vector<std::string> witness;
        for (PointIndex p : v.witness) witness.push_back(s.label(p));
        o.require(witness == expect.at("witness").get<std::vector<std::string>>(), std::string(file) + ": witness");
        o.require(v.lhs == expect.at("lhs").get<double>() && v.rhs == expect.at("rhs").get<double>(),
                  std::string(file) + ": lhs/rhs");
        seen += (seen.empty() ? "" : ", ") + name;
    }
    if (o.pass) o.detail = "detected " + seen + " with expected witnesses; G4 holds by construction";
    return o;
}

}  // namespace

int main() {
    std::vector<std::function<Outcome()>> criteria;
    criteria.emplace_back(discrete_space);
    criteria.emplace_back([] {
        return finite_example(examples::two_point(), examples::two_point_map(), 1, 0.0, true);
    });
    criteria.emplace_back([] {
        return finite_example(examples::three_point(), examples::three_point_map(), 2, 0.5, false);
    });
    criteria.emplace_back(interval_example);
    criteria.emplace_back(lambda_sequence);
    criteria.emplace_back(bound_domination);
    const std::vector<Corpus> corpus = random_corpus(240);
    criteria.emplace_back([&] { return oracle_equivalence(corpus); });
    criteria.emplace_back([&] { return soundness(corpus); });
    criteria.emplace_back(reductions);
    criteria.emplace_back(golden_tables);

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failed;
        std::printf("criterion %zu: %s %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    }
    return failed == 0 ? 0 : 1;
}
