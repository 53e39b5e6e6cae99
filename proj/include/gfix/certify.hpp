#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gfix/analysis.hpp"
#include "gfix/chains.hpp"
#include "gfix/coefficients.hpp"
#include "gfix/error.hpp"
#include "gfix/gspace.hpp"
#include "gfix/maps.hpp"
#include "gfix/solver.hpp"

namespace gfix {

enum class TheoremId {
    LipSeries,
    LipBoundedOrbit,
    SeqAn,
    SeqAnBoundedOrbit,
    PhiAn,
    PhiAnBoundedOrbit,
    UlcChainable,
    LambdaSeq,
    LambdaCor,
    LambdaVarSum,
    Common,
    CommonPhi,
};

inline constexpr std::array<TheoremId, 12> kAllTheorems{
    TheoremId::LipSeries,    TheoremId::LipBoundedOrbit, TheoremId::SeqAn,       TheoremId::SeqAnBoundedOrbit,
    TheoremId::PhiAn,        TheoremId::PhiAnBoundedOrbit, TheoremId::UlcChainable, TheoremId::LambdaSeq,
    TheoremId::LambdaCor,    TheoremId::LambdaVarSum,    TheoremId::Common,      TheoremId::CommonPhi,
};

inline std::string_view theorem_name(TheoremId id) {
    switch (id) {
        case TheoremId::LipSeries: return "LIP_SERIES";
        case TheoremId::LipBoundedOrbit: return "LIP_BOUNDED_ORBIT";
        case TheoremId::SeqAn: return "SEQ_AN";
        case TheoremId::SeqAnBoundedOrbit: return "SEQ_AN_BOUNDED_ORBIT";
        case TheoremId::PhiAn: return "PHI_AN";
        case TheoremId::PhiAnBoundedOrbit: return "PHI_AN_BOUNDED_ORBIT";
        case TheoremId::UlcChainable: return "ULC_CHAINABLE";
        case TheoremId::LambdaSeq: return "LAMBDA_SEQ";
        case TheoremId::LambdaCor: return "LAMBDA_COR";
        case TheoremId::LambdaVarSum: return "LAMBDA_VAR_SUM";
        case TheoremId::Common: return "COMMON";
        case TheoremId::CommonPhi: return "COMMON_PHI";
    }
    return "?";
}

inline TheoremId parse_theorem(std::string_view name) {
    for (TheoremId id : kAllTheorems) {
        if (theorem_name(id) == name) return id;
    }
    throw DomainError("unknown theorem '" + std::string(name) + "'");
}

inline bool is_family_theorem(TheoremId id) { return id == TheoremId::Common || id == TheoremId::CommonPhi; }

struct Hypothesis {
    std::string name;
    bool holds = false;
    bool assumed = false;  // declared by the caller rather than verified
    bool sampled = false;  // verified on a grid or to a finite horizon only
    std::string detail;
};

struct Certificate {
    TheoremId theorem = TheoremId::LipSeries;
    std::vector<Hypothesis> hypotheses;
    bool valid = false;
    bool sampled = false;
    std::string bound_quantity;
    // A-priori bound on bound_quantity as a function of the iteration index m.
    std::function<double(std::size_t)> bound;
    std::size_t horizon = 0;
    std::map<std::string, double> parameters;
    std::vector<std::string> notes;

    const Hypothesis* find(std::string_view name) const {
        for (const Hypothesis& h : hypotheses) {
            if (h.name == name) return &h;
        }
        return nullptr;
    }

    const Hypothesis* first_failure() const {
        for (const Hypothesis& h : hypotheses) {
            if (!h.holds) return &h;
        }
        return nullptr;
    }
};

struct CertifyParams {
    std::optional<double> eps;
    std::optional<double> lambda;
    std::optional<CoefficientSeq> a;
    std::optional<PhiFunction> phi;
    std::optional<CoefficientTensor> delta;
    std::optional<CoefficientTensor> gamma;
    std::optional<CoefficientTensor> theta;
    std::optional<CoefficientTensor> lamda;
    std::size_t horizon = 32;  // series and lambda-sequence horizon
    std::size_t depth = 8;     // N: iterate powers checked in pointwise conditions
    std::size_t max_iter = 1000;
    bool relaxed_an = false;  // accept a_n -> 0 in place of a summable sequence
    bool assume_continuity = false;
    bool assume_completeness = false;
};

namespace detail {

template <GSpaceLike S>
std::string describe_points(const S& space, const std::vector<typename S::point_type>& pts) {
    std::string out = "(";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out += ", ";
        out += space.describe(pts[i]);
    }
    return out + ")";
}

inline std::string describe_indices(const std::array<std::size_t, 3>& idx) {
    return "(i,j,k) = (" + std::to_string(idx[0]) + "," + std::to_string(idx[1]) + "," + std::to_string(idx[2]) + ")";
}

template <class T>
const T& need(const std::optional<T>& value, TheoremId id, const char* what) {
    if (!value) {
        throw DomainError(std::string(theorem_name(id)) + " needs parameter '" + what + "'");
    }
    return *value;
}

// sup_{j >= m} Lip(T^j) from Lip(T^1..T^H) using submultiplicativity beyond H:
// for j > H, Lip(T^j) <= Lip(T^H)^q max_{r<H} Lip(T^r) with q = floor(j/H).
struct LipTail {
    std::vector<double> lip;  // lip[0] = 1 (identity), lip[j] = Lip(T^j)
    double max_head = 1.0;

    double sup_from(std::size_t m) const {
        const std::size_t H = lip.size() - 1;
        double best = 0.0;
        for (std::size_t j = m; j <= H; ++j) best = std::max(best, lip[j]);
        const double q = static_cast<double>(std::max<std::size_t>(1, m / H));
        return std::max(best, std::pow(lip[H], q) * max_head);
    }

    double total() const {
        const std::size_t H = lip.size() - 1;
        if (lip[H] >= 1.0) return kInfinity;
        double head = 0.0;
        for (std::size_t j = 0; j < H; ++j) head += lip[j];
        return head / (1.0 - lip[H]);
    }
};

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

template <GSpaceLike S, class P>
typename S::point_type default_start(const S& space, const std::optional<P>& x0) {
    if (x0) {
        require_point(space, *x0);
        return *x0;
    }
    if constexpr (S::sampled) {
        return space.hi();
    } else {
        return 0;
    }
}

class Builder {
public:
    Builder(Certificate& cert, bool sampled) : cert_(cert), sampled_(sampled) {}

    void add(std::string name, bool holds, std::string detail, bool sampled = false) {
        cert_.hypotheses.push_back({std::move(name), holds, false, sampled, std::move(detail)});
    }

    void assumed(std::string name, bool declared, std::string_view flag) {
        Hypothesis h{std::move(name), declared, true, false, {}};
        h.detail = declared ? "declared by the caller (" + std::string(flag) + ")"
                            : "not verifiable on a sampled space; declare it with " + std::string(flag);
        cert_.hypotheses.push_back(std::move(h));
    }

    void note(std::string text) { cert_.notes.push_back(std::move(text)); }

    bool sampled() const { return sampled_; }

private:
    Certificate& cert_;
    bool sampled_;
};

}  // namespace detail

// Assembles the hypotheses of the requested theorem. Hypothesis failures make
// the certificate invalid; missing parameters are errors.
template <GSpaceLike S, SelfMapOn<S> M>
Certificate certify(const S& space, std::span<const M> maps, TheoremId id, const CertifyParams& params,
                    std::optional<typename S::point_type> x0_in = std::nullopt) {
    using P = typename S::point_type;
    constexpr bool kSampled = S::sampled;
    if (maps.empty()) {
        throw DomainError("certify needs at least one map");
    }
    if (!is_family_theorem(id) && maps.size() != 1) {
        throw DomainError(std::string(theorem_name(id)) + " takes a single map, got a family of " +
                          std::to_string(maps.size()));
    }
    for (const M& m : maps) require_compatible(space, m);
    const M& map = maps.front();
    const P x0 = detail::default_start(space, x0_in);
    const double K = space.k();

    Certificate cert;
    cert.theorem = id;
    cert.sampled = kSampled;
    cert.bound_quantity = "G(x_m, x*, x*)";
    cert.horizon = params.horizon;
    detail::Builder b(cert, kSampled);

    // Space-level hypotheses.
    const bool uses_g5prime = id == TheoremId::LipBoundedOrbit;
    const bool needs_k1 = is_family_theorem(id);
    if constexpr (!kSampled) {
        const AxiomReport report = validate_axioms(space);
        const Axiom polygon = uses_g5prime ? Axiom::G5Prime : Axiom::G5;
        std::string detail;
        for (Axiom a : {Axiom::G1, Axiom::G2, Axiom::G3, Axiom::G4, polygon}) {
            const AxiomVerdict& v = report[a];
            if (!v.holds && detail.empty()) {
                detail = std::string(axiom_name(a)) + " fails at " + detail::describe_points(space, v.witness);
            }
        }
        if (detail.empty()) detail = "G1-G4 and " + std::string(axiom_name(polygon)) + " hold exhaustively";
        b.add(uses_g5prime ? "(X,G,K) is a G-metric type space satisfying (G5')" : "(X,G,K) is a G-metric type space",
              report.holds_with(polygon), detail);
        b.add("(X,G,K) is G-complete", true, "every finite G-metric type space is G-complete");
    } else {
        const SampledAxiomReport sampled = validate_axioms(space, 3, 9);
        if (!sampled.report.all_hold()) {
            std::string failing;
            for (Axiom a : kAllAxioms) {
                if (!sampled.report[a].holds) failing += (failing.empty() ? "" : ", ") + std::string(axiom_name(a));
            }
            b.note("strict axiom validation on a 9-point grid fails: " + failing);
        }
        b.assumed("(X,G,K) is G-complete", params.assume_completeness, "--assume-complete");
    }
    if (needs_k1) {
        b.add("(X,G) is a G-metric space (K = 1)", K == 1.0, "K = " + format_real(K));
    }

    auto continuity = [&](std::string name) {
        if constexpr (!kSampled) {
            b.add(std::move(name), true, "every self-map of a finite space is continuous");
        } else {
            b.assumed(std::move(name), params.assume_continuity, "--assume-continuous");
        }
    };

    // Eventual constancy decides every "for all n" condition on finite spaces.
    std::optional<std::size_t> const_from;
    if constexpr (!kSampled) {
        const_from = eventually_constant(space, map);
    }

    // Bound ingredients.
    std::function<double(std::size_t)> bound;
    const P x1 = map(x0);
    const GValue G0 = space.g(x0, x1, x1);

    switch (id) {
        case TheoremId::LipSeries:
        case TheoremId::LipBoundedOrbit: {
            const std::size_t H = std::max<std::size_t>(params.horizon, 8);
            const auto lips = iterated_lipschitz(space, map, H);
            detail::LipTail tail;
            tail.lip.push_back(1.0);
            bool all_bounded = true;
            std::string unbounded;
            for (std::size_t j = 0; j < lips.size(); ++j) {
                if (!lips[j].bounded && all_bounded) {
                    all_bounded = false;
                    unbounded = "Lip(T^" + std::to_string(j + 1) + ") is unbounded at " +
                                detail::describe_points(space, lips[j].witness);
                }
                tail.lip.push_back(lips[j].value);
            }
            for (std::size_t j = 0; j < H; ++j) tail.max_head = std::max(tail.max_head, tail.lip[j]);
            b.add("T^n is Lipschitzian for all n >= 1", all_bounded,
                  all_bounded ? "Lip(T^n) finite for n <= " + std::to_string(H) : unbounded, true);
            cert.parameters["Lip(T)"] = tail.lip[1];
            cert.horizon = H;

            bool decay = false;
            std::string detail;
            if constexpr (!kSampled) {
                decay = const_from.has_value();
                detail = decay ? "T^" + std::to_string(*const_from) + " is constant, so Lip(T^n) = 0 for n >= " +
                                     std::to_string(*const_from)
                               : "T^n is never constant, so Lip(T^n) does not tend to 0";
            } else {
                const bool has_zero = std::find(tail.lip.begin() + 1, tail.lip.end(), 0.0) != tail.lip.end();
                if (has_zero) {
                    decay = true;
                    detail = "Lip(T^n) vanishes within the horizon";
                } else if (all_bounded) {
                    const auto seq = CoefficientSeq::tabulated({tail.lip.begin() + 1, tail.lip.end()});
                    const SeriesVerdict sv = id == TheoremId::LipSeries
                                                 ? series_converges(seq)
                                                 : SeriesVerdict{tends_to_zero(seq), 0.0, std::nullopt, "tail ratio test"};
                    decay = sv.status == SeriesStatus::Convergent;
                    detail = std::string(series_status_name(sv.status)) + " over " + std::to_string(H) + " terms";
                }
            }
            if (id == TheoremId::LipSeries) {
                b.add("sum_{n>=0} Lip(T^n) < infinity", decay && all_bounded, detail, kSampled);
                const double S_total = tail.total();
                cert.parameters["sum Lip(T^n)"] = S_total;
                const GValue g0 = space.g(x1, x0, x0);
                bound = [tail, K, S_total, g0](std::size_t m) { return K * S_total * g0 * tail.sup_from(m); };
            } else {
                b.add("lim_{n->infinity} Lip(T^n) = 0", decay && all_bounded, detail, kSampled);
                const std::vector<P> orbit = picard_orbit(space, map, x0, std::min<std::size_t>(params.max_iter, 128));
                const GValue alpha = points_diameter(space, orbit);
                b.add("the orbit {T^n x, n >= 1} is bounded for some x", std::isfinite(alpha),
                      "sup G over the first " + std::to_string(orbit.size()) + " orbit points = " + format_real(alpha),
                      kSampled);
                cert.parameters["alpha"] = alpha;
                bound = [tail, alpha](std::size_t m) { return alpha * tail.sup_from(m); };
            }
            break;
        }

        case TheoremId::SeqAn:
        case TheoremId::SeqAnBoundedOrbit:
        case TheoremId::PhiAn:
        case TheoremId::PhiAnBoundedOrbit: {
            const bool is_phi = id == TheoremId::PhiAn || id == TheoremId::PhiAnBoundedOrbit;
            const bool bounded_orbit = id == TheoremId::SeqAnBoundedOrbit || id == TheoremId::PhiAnBoundedOrbit;
            const CoefficientSeq& a = detail::need(params.a, id, "a");
            const PhiFunction phi = is_phi ? detail::need(params.phi, id, "phi") : PhiFunction::identity();
            const double s = phi.degree();
            continuity(bounded_orbit ? "T is orbitally continuous" : "T is sequentially continuous");

            const std::vector<double> terms = a.terms();
            const auto nonpos = std::find_if(terms.begin(), terms.end(), [](double t) { return !(t > 0.0); });
            b.add("a_n > 0 for all n >= 1", nonpos == terms.end(),
                  nonpos == terms.end() ? "checked for n <= " + std::to_string(terms.size())
                                        : "a_" + std::to_string(nonpos - terms.begin() + 1) + " = " +
                                              format_real(*nonpos),
                  !a.closed_form());
            const double a1 = a(1);
            cert.parameters["a_1"] = a1;
            b.add("0 <= a_1 < 1/2", a1 < 0.5, "a_1 = " + format_real(a1));
            b.note("a_1 = " + format_real(a1));

            std::size_t N = params.depth;
            if (const_from) N = std::max(N, *const_from);
            const auto cond = is_phi ? check_phi_condition(space, map, a, phi, N)
                                     : check_sequential_condition(space, map, a, N);
            const std::string cname =
                is_phi ? "F(G(T^n x,T^n y,T^n z)) <= F(a_n [G(x,Tx,Tx)+G(y,Ty,Ty)+G(z,Tz,Tz)]) for all x,y,z"
                       : "G(T^n x,T^n y,T^n z) <= a_n [G(x,Tx,Tx)+G(y,Ty,Ty)+G(z,Tz,Tz)] for all x,y,z";
            std::string cdetail;
            bool cholds = cond.holds;
            if (!cond.holds) {
                cdetail = "fails at (x,y,z) = " + detail::describe_points(space, cond.witness) + ", n = " +
                          std::to_string(cond.witness_n) + ": " + format_real(cond.lhs) + " > " + format_real(cond.rhs);
            } else if constexpr (!kSampled) {
                if (const_from) {
                    cdetail = "checked for n <= " + std::to_string(N) + "; T^" + std::to_string(*const_from) +
                              " is constant so the left side vanishes beyond";
                } else {
                    cholds = false;
                    cdetail = "holds for n <= " + std::to_string(N) +
                              " but T^n is never constant, so it fails once a_n drops below the least positive G "
                              "ratio";
                }
            } else {
                cdetail = "checked on the sample grid for n <= " + std::to_string(N);
            }
            b.add(cname, cholds, cdetail, kSampled);
            cert.horizon = N;

            if (bounded_orbit || params.relaxed_an) {
                const SeriesStatus st = tends_to_zero(a);
                b.add("lim_{n->infinity} a_n = 0", st == SeriesStatus::Convergent, std::string(series_status_name(st)),
                      !a.closed_form());
                if (params.relaxed_an && !bounded_orbit) b.note("relaxed mode: a_n -> 0 replaces sum a_n < infinity");
            } else {
                bool ok = false;
                std::string detail;
                try {
                    const SeriesVerdict sv = series_converges(a);
                    ok = sv.status == SeriesStatus::Convergent;
                    detail = std::string(series_status_name(sv.status)) + " (" + sv.reason + ")";
                } catch (const DomainError& e) {
                    detail = e.what();
                }
                b.add("the series sum a_n is convergent", ok, detail, !a.closed_form());
            }

            if (bounded_orbit) {
                const std::vector<P> orbit = picard_orbit(space, map, x0, std::min<std::size_t>(params.max_iter, 128));
                const GValue beta = points_diameter(space, orbit);
                b.add("the orbit {T^n x, n >= 1} is bounded for some x", std::isfinite(beta),
                      "sup G over the first " + std::to_string(orbit.size()) + " orbit points = " + format_real(beta),
                      kSampled);
                cert.parameters["beta"] = beta;
                bound = [a, beta](std::size_t m) { return m == 0 ? beta : 3.0 * beta * tail_sup(a, m); };
            } else if (a1 < 0.5) {
                const double t = std::pow(2.0 * a1, s);
                const double C = 1.0 + t / (1.0 - t);
                const double FG0 = phi(G0);
                const double Ks = std::pow(K, s);
                cert.parameters["G0"] = G0;
                bound = [a, phi, C, FG0, Ks, s](std::size_t m) {
                    const double tail = tail_sum_upper(a, std::max<std::size_t>(m, 1), s);
                    const double f = m == 0 ? Ks * (FG0 + C * FG0 * tail) : Ks * C * FG0 * tail;
                    return phi.inverse(f);
                };
            }
            break;
        }

        case TheoremId::UlcChainable: {
            const double eps = detail::need(params.eps, id, "eps");
            const double lam = detail::need(params.lambda, id, "lambda");
            if (!(lam >= 0.0 && lam < 1.0)) {
                throw DomainError("ULC_CHAINABLE needs lambda in [0, 1), got " + format_real(lam));
            }
            if (!(eps >= 0.0)) {
                throw DomainError("ULC_CHAINABLE needs eps >= 0, got " + format_real(eps));
            }
            if constexpr (kSampled) {
                b.assumed("X is T-orbitally complete", params.assume_completeness, "--assume-complete");
            } else {
                b.add("X is T-orbitally complete", true, "finite space");
            }
            const auto chain = is_chainable(space, eps / 2.0, false);
            b.add("(X,G,K) is eps/2-chainable", chain.chainable,
                  chain.chainable ? "max degree " + std::to_string(chain.max_degree)
                                  : "no chain from " + space.describe(chain.blocking_pair->first) + " to " +
                                        space.describe(chain.blocking_pair->second),
                  kSampled);
            const auto ulc = check_local_contractive(space, map, eps, lam);
            b.add("T is (eps,lambda)-uniformly locally contractive", ulc.holds,
                  ulc.holds ? "holds on every ball C_G(x, eps)"
                            : "fails at (x,u,v,p) = " + detail::describe_points(space, ulc.witness) + ": " +
                                  format_real(ulc.lhs) + " > " + format_real(ulc.rhs),
                  kSampled);
            std::size_t n_deg = 0;
            bool have_chain = true;
            if (!(x1 == x0)) {
                const auto c = find_chain(space, x0, x1, eps / 2.0);
                have_chain = c.has_value();
                if (c) n_deg = c->degree();
            }
            cert.parameters["eps"] = eps;
            cert.parameters["lambda"] = lam;
            cert.parameters["n_deg"] = static_cast<double>(n_deg);
            cert.parameters["K"] = K;
            if (have_chain) {
                bound = [lam, K, n_deg, eps](std::size_t m) { return bound_ulc(lam, K, n_deg, eps, m); };
            }
            break;
        }

        case TheoremId::LambdaSeq:
        case TheoremId::LambdaCor:
        case TheoremId::LambdaVarSum: {
            const CoefficientTensor& delta = detail::need(params.delta, id, "delta");
            const bool with_gamma = id == TheoremId::LambdaSeq || (id == TheoremId::LambdaVarSum && params.gamma);
            const CoefficientTensor* gamma = with_gamma ? &detail::need(params.gamma, id, "gamma") : nullptr;
            const PhiFunction phi = params.phi.value_or(PhiFunction::identity());
            const double s = phi.degree();
            auto p = [s](double v) { return s == 1.0 ? v : std::pow(v, s); };
            if (id != TheoremId::LambdaVarSum || with_gamma) continuity("T is sequentially continuous");

            std::size_t N = params.depth;
            if constexpr (!kSampled) N = std::max(N, space.size());
            cert.horizon = N;

            const auto dbound = tensor_bound(N, 0.5, [&](std::size_t i, std::size_t j, std::size_t k) {
                return std::max(delta(i, j, k), gamma ? (*gamma)(i, j, k) : 0.0);
            });
            b.add(with_gamma ? "0 <= Delta, Gamma < 1/2" : "0 <= Delta < 1/2", dbound.holds,
                  (dbound.holds ? "max " : "reaches ") + format_real(dbound.value) + " at " +
                      detail::describe_indices(dbound.witness));

            const TensorForm form = id == TheoremId::LambdaCor ? TensorForm::DeltaWithSelf
                                    : with_gamma               ? TensorForm::DeltaGamma
                                                               : TensorForm::DeltaOnly;
            const auto cond = check_tensor_condition(space, map, form, delta, gamma, phi, N);
            std::string cname = "F(G(T^i x,T^j y,T^k z)) <= F(Delta [G(x,T^i x,T^i x)+G(y,T^j y,T^j y)+G(z,T^k z,T^k z)";
            cname += form == TensorForm::DeltaWithSelf ? "+G(x,y,z)])" : "])";
            if (form == TensorForm::DeltaGamma) cname += " + F(Gamma G(x,y,z))";
            cname += " for x != y";
            b.add(cname, cond.holds,
                  cond.holds ? "checked for i,j,k <= " + std::to_string(N)
                             : "fails at (x,y,z) = " + detail::describe_points(space, cond.witness) + ", " +
                                   detail::describe_indices(cond.indices) + ": " + format_real(cond.lhs) + " > " +
                                   format_real(cond.rhs),
                  kSampled);

            // r_i evaluated at (i, i+1, i+1).
            auto rfun = [&](std::size_t i) {
                const double d = p(delta(i, i + 1, i + 1));
                const double t = std::pow(2.0 * delta(i, i + 1, i + 1), s);
                if (!(t < 1.0)) {
                    throw DomainError("denominator 1 - (2 Delta)^s is not positive at index " + std::to_string(i));
                }
                if (form == TensorForm::DeltaGamma) return (d + p((*gamma)(i, i + 1, i + 1))) / (1.0 - t);
                return t / (1.0 - t);
            };
            const bool constant = delta.is_constant() && (!gamma || gamma->is_constant());
            std::size_t len = params.horizon;
            if (!constant) {
                std::size_t th = delta.horizon().value_or(params.horizon);
                if (gamma && gamma->horizon()) th = std::min(th, *gamma->horizon());
                len = std::min(len, th >= 2 ? th - 1 : 0);
            }
            std::optional<CoefficientSeq> r;
            std::string rerr;
            try {
                r = build_r_sequence(constant, len, rfun);
            } catch (const DomainError& e) {
                rerr = e.what();
            }

            const double FG0 = phi(G0);
            const double Ks = std::pow(K, s);
            if (id != TheoremId::LambdaVarSum) {
                std::optional<LambdaVerdict> lv;
                if (r && r->horizon() >= 4) {
                    lv = params.lambda ? lambda_sequence_check(*r, *params.lambda) : lambda_sequence_check(*r);
                }
                const bool ok = lv && lv->certified && lv->non_increasing;
                std::string detail = !rerr.empty() ? rerr
                                     : !lv     ? "r-sequence horizon below 4"
                                               : "lambda = " + format_real(lv->lambda) + ", n(lambda) = " +
                                                 std::to_string(lv->n_lambda) + ", non-increasing: " +
                                                 detail::yes_no(lv->non_increasing) +
                                                 (lv->certified ? "" : ", not a lambda-sequence");
                b.add("(r_i) is a non-increasing lambda-sequence", ok, detail, true);
                if (ok) {
                    const double lam = lv->lambda;
                    const std::size_t nl = lv->n_lambda;
                    cert.parameters["lambda"] = lam;
                    cert.parameters["n_lambda"] = static_cast<double>(nl);
                    cert.parameters["r_1"] = (*r)(1);
                    bound = [lam, nl, K, s, FG0, phi](std::size_t m) {
                        if (m < nl) return kInfinity;
                        return phi.inverse(bound_lambda_seq(lam, m, K, s, FG0));
                    };
                }
            } else {
                std::optional<ProductVerdict> pv;
                if (r && r->horizon() >= 8) pv = product_series_check(*r);
                const double sup_d = [&] {
                    double best = 0.0;
                    for (std::size_t i = N / 2 + 1; i <= N; ++i) {
                        for (std::size_t j = 1; j <= N; ++j) {
                            for (std::size_t k = 1; k <= N; ++k) {
                                best = std::max(best, p(delta(i, j, k)));
                                if (gamma) best = std::max(best, p((*gamma)(i, j, k)));
                            }
                        }
                    }
                    return best;
                }();
                b.add(with_gamma ? "limsup_i Delta^s < 1 and limsup_i Gamma^s < 1 for each j,k"
                                 : "limsup_i Delta^s < 1 for each j,k",
                      sup_d < 1.0, "tail sup over i in (N/2, N] = " + format_real(sup_d), true);
                const bool ok = pv && pv->series.status == SeriesStatus::Convergent;
                b.add("sum_{n>=1} C_n < infinity where C_n = r_1 ... r_n", ok,
                      !rerr.empty() ? rerr
                      : !pv         ? "r-sequence horizon below 8"
                                    : std::string(series_status_name(pv->series.status)) + " (" + pv->series.reason + ")",
                      true);
                if (ok) {
                    const ProductVerdict prod = *pv;
                    bound = [prod, Ks, FG0, phi](std::size_t m) {
                        if (m == 0) return kInfinity;
                        return phi.inverse(Ks * FG0 * product_tail_upper(prod, m));
                    };
                }
            }
            break;
        }

        case TheoremId::Common:
        case TheoremId::CommonPhi: {
            const CoefficientTensor& delta = detail::need(params.delta, id, "delta");
            const CoefficientTensor& theta = detail::need(params.theta, id, "theta");
            const CoefficientTensor& lamda = detail::need(params.lamda, id, "lambda tensor");
            const PhiFunction phi = id == TheoremId::CommonPhi ? detail::need(params.phi, id, "phi") : PhiFunction::identity();
            const double s = phi.degree();
            cert.bound_quantity = "G(x_m, x*, x*) along x_n = T_n(x_{n-1})";

            std::size_t N = std::max(params.depth, maps.size());
            if constexpr (!kSampled) N = std::max(N, space.size());
            cert.horizon = N;

            std::optional<CommonCoefficientVerdict> cv;
            std::string cerr;
            try {
                cv = common_coefficient_check(delta, theta, lamda, std::max(N, params.horizon), s);
            } catch (const DomainError& e) {
                cerr = e.what();
            }
            const std::string bname = s == 1.0 ? "0 <= Delta + 3 Theta + 4 Lambda < 1/2"
                                               : "0 <= Delta^s + 3 Theta^s + 4 Lambda^s < 1/2";
            b.add(bname, cv && cv->bound.holds,
                  !cerr.empty() ? cerr
                                : (cv->bound.holds ? "max " : "reaches ") + format_real(cv->bound.value) + " at " +
                                      detail::describe_indices(cv->bound.witness));

            const auto cond = check_common_condition(space, maps, delta, theta, lamda, phi, N);
            b.add(std::string(s == 1.0 ? "G(T_i x,T_j y,T_k z)" : "F(G(T_i x,T_j y,T_k z))") +
                      " <= Delta G(x,y,z) + Theta [G(T_i x,x,x)+G(y,T_j y,y)+G(z,z,T_k z)] + Lambda "
                      "[G(T_i x,y,z)+G(x,T_j y,z)+G(x,y,T_k z)] for all x,y,z",
                  cond.holds,
                  cond.holds ? "checked for i,j,k <= " + std::to_string(N)
                             : "fails at (x,y,z) = " + detail::describe_points(space, cond.witness) + ", " +
                                   detail::describe_indices(cond.indices) + ": " + format_real(cond.lhs) + " > " +
                                   format_real(cond.rhs),
                  kSampled);

            const bool ok = cv && cv->lambda && cv->lambda->certified && cv->lambda->non_increasing;
            std::string detail = !cerr.empty()  ? cerr
                                 : !cv->lambda ? "r-sequence horizon below 4"
                                               : "lambda = " + format_real(cv->lambda->lambda) + ", n(lambda) = " +
                                                 std::to_string(cv->lambda->n_lambda) + ", non-increasing: " +
                                                 detail::yes_no(cv->lambda->non_increasing) +
                                                 (cv->lambda->certified ? "" : ", not a lambda-sequence");
            b.add("(r_i) is a non-increasing lambda-sequence", ok, detail, true);
            if (ok) {
                const double lam = cv->lambda->lambda;
                const std::size_t nl = cv->lambda->n_lambda;
                const P y1 = maps[0](x0);
                const P y2 = maps[1 % maps.size()](y1);
                const GValue g012 = space.g(x0, y1, y2);
                cert.parameters["lambda"] = lam;
                cert.parameters["n_lambda"] = static_cast<double>(nl);
                cert.parameters["G(x0,x1,x2)"] = g012;
                const double Fg = phi(g012);
                bound = [lam, nl, Fg, phi](std::size_t m) {
                    if (m < nl) return kInfinity;
                    return phi.inverse(std::pow(lam, static_cast<double>(m)) / (1.0 - lam) * Fg);
                };
            }
            break;
        }
    }

    cert.valid = std::all_of(cert.hypotheses.begin(), cert.hypotheses.end(), [](const Hypothesis& h) { return h.holds; });
    if (cert.valid && bound) {
        cert.bound = std::move(bound);
    } else {
        cert.bound = [](std::size_t) { return kInfinity; };
    }
    return cert;
}

template <GSpaceLike S, SelfMapOn<S> M>
Certificate certify(const S& space, const M& map, TheoremId id, const CertifyParams& params,
                    std::optional<typename S::point_type> x0 = std::nullopt) {
    return certify(space, std::span<const M>(&map, 1), id, params, x0);
}

}  // namespace gfix
