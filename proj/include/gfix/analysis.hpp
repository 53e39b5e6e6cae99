#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfix/coefficients.hpp"
#include "gfix/error.hpp"
#include "gfix/gspace.hpp"
#include "gfix/maps.hpp"

namespace gfix {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Lipschitz constants

template <class P = PointIndex>
struct LipschitzResult {
    bool bounded = true;
    GValue value = 0.0;
    // Triple attaining the maximal ratio, or a triple with G = 0 whose image
    // has G > 0 when unbounded. Empty when no triple has G > 0.
    std::vector<P> witness;
    bool sampled = false;
};

namespace detail {

inline std::size_t distinct_count(std::size_t a, std::size_t b, std::size_t c) {
    return 1 + (b != a ? 1 : 0) + (c != a && c != b ? 1 : 0);
}

// Ordering for reported extremal witnesses: larger ratio first, then the
// triple with more distinct points, then lexicographic (first seen wins).
struct WorstTriple {
    double ratio = -1.0;
    std::size_t distinct = 0;
    std::size_t a = 0, b = 0, c = 0;
    std::size_t extra = 0;
    bool found = false;

    bool offer(double r, std::size_t i, std::size_t j, std::size_t k, std::size_t tag = 0) {
        const std::size_t d = distinct_count(i, j, k);
        if (!found || r > ratio || (r == ratio && d > distinct)) {
            ratio = r;
            distinct = d;
            a = i;
            b = j;
            c = k;
            extra = tag;
            found = true;
            return true;
        }
        return false;
    }
};

template <GSpaceLike S, class M>
std::vector<typename S::point_type> images(const M& map, const std::vector<typename S::point_type>& pts) {
    std::vector<typename S::point_type> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(map(p));
    return out;
}

// orbit[p][n] = T^n(pts[p]) for n = 0..depth.
template <GSpaceLike S, class M>
std::vector<std::vector<typename S::point_type>> orbit_table(const M& map,
                                                             const std::vector<typename S::point_type>& pts,
                                                             std::size_t depth) {
    std::vector<std::vector<typename S::point_type>> table(pts.size());
    for (std::size_t p = 0; p < pts.size(); ++p) {
        table[p].reserve(depth + 1);
        table[p].push_back(pts[p]);
        for (std::size_t n = 1; n <= depth; ++n) table[p].push_back(map(table[p].back()));
    }
    return table;
}

template <class P>
std::vector<P> subsample(const std::vector<P>& pts, std::size_t max_points) {
    if (max_points < 2 || pts.size() <= max_points) return pts;
    std::vector<P> out;
    out.reserve(max_points);
    for (std::size_t i = 0; i < max_points; ++i) {
        out.push_back(pts[(i * (pts.size() - 1)) / (max_points - 1)]);
    }
    return out;
}

}  // namespace detail

// Smallest k with G(Tx,Ty,Tz) <= k G(x,y,z) over all triples with G > 0.
template <GSpaceLike S, SelfMapOn<S> M>
LipschitzResult<typename S::point_type> lipschitz_constant(const S& space, const M& map) {
    using P = typename S::point_type;
    require_compatible(space, map);
    const std::vector<P> pts = space.sample();
    const std::vector<P> img = detail::images<S>(map, pts);
    const std::size_t n = pts.size();

    LipschitzResult<P> result;
    result.sampled = S::sampled;
    detail::WorstTriple worst;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            for (std::size_t k = j; k < n; ++k) {
                const GValue den = space.g(pts[i], pts[j], pts[k]);
                const GValue num = space.g(img[i], img[j], img[k]);
                if (den == 0.0) {
                    if (num > 0.0) {
                        result.bounded = false;
                        result.value = kInfinity;
                        result.witness = {pts[i], pts[j], pts[k]};
                        return result;
                    }
                    continue;
                }
                worst.offer(num / den, i, j, k);
            }
        }
    }
    if (worst.found) {
        result.value = worst.ratio;
        result.witness = {pts[worst.a], pts[worst.b], pts[worst.c]};
    }
    return result;
}

// [Lip(T^1), ..., Lip(T^N)].
template <GSpaceLike S, SelfMapOn<S> M>
std::vector<LipschitzResult<typename S::point_type>> iterated_lipschitz(const S& space, const M& map,
                                                                        std::size_t N) {
    if (N == 0) {
        throw DomainError("iterated_lipschitz needs N >= 1");
    }
    std::vector<LipschitzResult<typename S::point_type>> out;
    out.reserve(N);
    for (std::size_t n = 1; n <= N; ++n) {
        out.push_back(lipschitz_constant(space, power(map, n)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Series

enum class SeriesStatus { Convergent, Divergent, Undecided };

inline std::string_view series_status_name(SeriesStatus s) {
    switch (s) {
        case SeriesStatus::Convergent: return "certified-convergent";
        case SeriesStatus::Divergent: return "certified-divergent";
        case SeriesStatus::Undecided: return "undecided";
    }
    return "?";
}

struct SeriesVerdict {
    SeriesStatus status = SeriesStatus::Undecided;
    double partial_sum = 0.0;  // sum over the horizon
    std::optional<double> ratio;
    std::string reason;
};

namespace detail {

// Ratio test on the last half of a finite list of positive terms.
inline SeriesVerdict tail_ratio_test(const std::vector<double>& terms) {
    SeriesVerdict v;
    for (double t : terms) v.partial_sum += t;
    const std::size_t h = terms.size();
    double max_ratio = 0.0;
    double min_ratio = kInfinity;
    for (std::size_t i = h / 2; i + 1 < h; ++i) {
        const double r = terms[i + 1] / terms[i];
        max_ratio = std::max(max_ratio, r);
        min_ratio = std::min(min_ratio, r);
    }
    if (max_ratio < 1.0) {
        v.status = SeriesStatus::Convergent;
        v.ratio = max_ratio;
        v.reason = "tail ratio test";
    } else if (min_ratio >= 1.0) {
        v.status = SeriesStatus::Divergent;
        v.ratio = min_ratio;
        v.reason = "terms non-decreasing over the tail";
    } else {
        v.reason = "tail ratios straddle 1";
    }
    return v;
}

}  // namespace detail

inline SeriesVerdict series_converges(const CoefficientSeq& seq) {
    using F = CoefficientSeq::Family;
    if (seq.horizon() < 8) {
        throw DomainError("series test needs a horizon of at least 8 terms");
    }
    const std::vector<double> terms = seq.terms();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (!(terms[i] > 0.0)) {
            throw DomainError("series term a_" + std::to_string(i + 1) + " = " + format_real(terms[i]) +
                              " is not positive");
        }
    }
    if (seq.family() == F::Tabulated) {
        return detail::tail_ratio_test(terms);
    }
    SeriesVerdict v;
    for (double t : terms) v.partial_sum += t;
    switch (seq.family()) {
        case F::Geometric:
            v.ratio = seq.second_param();
            if (seq.second_param() < 1.0) {
                v.status = SeriesStatus::Convergent;
                v.reason = "geometric with ratio < 1";
            } else {
                v.status = SeriesStatus::Divergent;
                v.reason = "geometric with ratio >= 1";
            }
            break;
        case F::InvSqShifted:
            v.status = SeriesStatus::Convergent;
            v.reason = "dominated by c^2 / n^2";
            break;
        case F::Harmonic:
            v.status = SeriesStatus::Divergent;
            v.reason = "harmonic series";
            break;
        case F::Constant:
            v.status = SeriesStatus::Divergent;
            v.reason = "constant positive terms";
            break;
        case F::Tabulated: break;
    }
    return v;
}

// Whether a_n -> 0. Nonnegative terms allowed.
inline SeriesStatus tends_to_zero(const CoefficientSeq& seq) {
    using F = CoefficientSeq::Family;
    switch (seq.family()) {
        case F::Geometric:
            return (seq.first_param() == 0.0 || seq.second_param() < 1.0) ? SeriesStatus::Convergent
                                                                           : SeriesStatus::Divergent;
        case F::InvSqShifted:
        case F::Harmonic: return SeriesStatus::Convergent;
        case F::Constant: return seq.first_param() == 0.0 ? SeriesStatus::Convergent : SeriesStatus::Divergent;
        case F::Tabulated: break;
    }
    const std::vector<double>& t = seq.values();
    const std::size_t h = t.size();
    bool zero_tail = true;
    bool positive = true;
    for (std::size_t i = h / 2; i < h; ++i) {
        zero_tail = zero_tail && t[i] == 0.0;
        positive = positive && t[i] > 0.0;
    }
    if (zero_tail) return SeriesStatus::Convergent;
    if (!positive || h < 2) return SeriesStatus::Undecided;
    return detail::tail_ratio_test(t).status;
}

// Upper bound for sum_{i >= m} a_i^s. Closed forms are exact; tabulated
// sequences extrapolate the tail with the observed tail ratio.
inline double tail_sum_upper(const CoefficientSeq& seq, std::size_t m, double s = 1.0) {
    using F = CoefficientSeq::Family;
    m = std::max<std::size_t>(m, 1);
    switch (seq.family()) {
        case F::Geometric: {
            const double q = seq.first_param();
            const double rho = seq.second_param();
            if (q == 0.0) return 0.0;
            if (rho >= 1.0) return kInfinity;
            const double rs = std::pow(rho, s);
            return std::pow(q, s) * std::pow(rs, static_cast<double>(m)) / (1.0 - rs);
        }
        case F::InvSqShifted: {
            const double c = seq.first_param();
            if (c == 0.0) return 0.0;
            constexpr std::size_t kExplicit = 64;
            double sum = 0.0;
            for (std::size_t i = m; i < m + kExplicit; ++i) sum += std::pow(seq(i), s);
            // (c / (1 + 2^i))^(2s) <= c^(2s) 4^(-s i)
            const double q = std::pow(0.25, s);
            const double first = std::pow(c, 2.0 * s) * std::pow(q, static_cast<double>(m + kExplicit));
            return sum + first / (1.0 - q);
        }
        case F::Harmonic: return kInfinity;
        case F::Constant: return seq.first_param() == 0.0 ? 0.0 : kInfinity;
        case F::Tabulated: break;
    }
    const std::vector<double>& t = seq.values();
    const std::size_t h = t.size();
    double sum = 0.0;
    for (std::size_t i = m; i <= h; ++i) sum += std::pow(t[i - 1], s);
    const double last = t[h - 1];
    if (last == 0.0) return sum;
    double rho = 0.0;
    for (std::size_t i = h / 2; i + 1 < h; ++i) {
        if (t[i] == 0.0) return kInfinity;
        rho = std::max(rho, t[i + 1] / t[i]);
    }
    if (h < 2 || rho >= 1.0) return kInfinity;
    const double rs = std::pow(rho, s);
    const double start = m > h ? std::pow(last, s) * std::pow(rs, static_cast<double>(m - h)) : std::pow(last, s) * rs;
    return sum + start / (1.0 - rs);
}

// sup_{i >= m} a_i (over the horizon for tabulated sequences).
inline double tail_sup(const CoefficientSeq& seq, std::size_t m) {
    using F = CoefficientSeq::Family;
    m = std::max<std::size_t>(m, 1);
    switch (seq.family()) {
        case F::Geometric:
            if (seq.second_param() > 1.0 && seq.first_param() > 0.0) return kInfinity;
            return seq(m);
        case F::InvSqShifted:
        case F::Harmonic:
        case F::Constant: return seq(m);
        case F::Tabulated: break;
    }
    const std::vector<double>& t = seq.values();
    if (m > t.size()) return t.back();
    return *std::max_element(t.begin() + static_cast<std::ptrdiff_t>(m - 1), t.end());
}

// ---------------------------------------------------------------------------
// Local contractivity on balls C_G(x, eps) = {y : G(x,y,y) <= eps}

template <class P = PointIndex>
struct LocalContractionVerdict {
    bool holds = true;
    std::vector<P> witness;  // (x, u, v, p): center then the offending triple
    GValue lhs = 0.0;
    GValue rhs = 0.0;
    bool sampled = false;
};

namespace detail {

// Triples (u <= v <= p) lying in a common ball, with the first such center.
class BallCover {
public:
    template <GSpaceLike S>
    BallCover(const S& space, const std::vector<typename S::point_type>& pts, GValue eps)
        : n_(pts.size()), words_((n_ + 63) / 64), bits_(n_ * words_, 0) {
        for (std::size_t y = 0; y < n_; ++y) {
            for (std::size_t x = 0; x < n_; ++x) {
                if (space.g(pts[x], pts[y], pts[y]) <= eps) {
                    bits_[y * words_ + x / 64] |= std::uint64_t{1} << (x % 64);
                }
            }
        }
    }

    std::optional<std::size_t> center(std::size_t u, std::size_t v, std::size_t p) const {
        for (std::size_t w = 0; w < words_; ++w) {
            const std::uint64_t common = bits_[u * words_ + w] & bits_[v * words_ + w] & bits_[p * words_ + w];
            if (common != 0) {
                return w * 64 + static_cast<std::size_t>(std::countr_zero(common));
            }
        }
        return std::nullopt;
    }

private:
    std::size_t n_;
    std::size_t words_;
    std::vector<std::uint64_t> bits_;
};

}  // namespace detail

// Checks G(Tu,Tv,Tp) <= lam G(u,v,p) for every triple inside some ball
// C_G(x, eps). The reported witness is the worst violation.
template <GSpaceLike S, SelfMapOn<S> M>
LocalContractionVerdict<typename S::point_type> check_local_contractive(const S& space, const M& map, GValue eps,
                                                                        double lam) {
    using P = typename S::point_type;
    if (!(lam >= 0.0 && lam < 1.0)) {
        throw DomainError("lambda must lie in [0, 1), got " + format_real(lam));
    }
    if (!(eps >= 0.0)) {
        throw DomainError("eps must be >= 0, got " + format_real(eps));
    }
    require_compatible(space, map);
    const std::vector<P> pts = space.sample();
    const std::vector<P> img = detail::images<S>(map, pts);
    const detail::BallCover cover(space, pts, eps);
    const std::size_t n = pts.size();

    LocalContractionVerdict<P> verdict;
    verdict.sampled = S::sampled;
    detail::WorstTriple worst;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u; v < n; ++v) {
            for (std::size_t p = v; p < n; ++p) {
                const GValue num = space.g(img[u], img[v], img[p]);
                const GValue den = space.g(pts[u], pts[v], pts[p]);
                if (!(num > lam * den + kAxiomTolerance)) continue;
                const auto c = cover.center(u, v, p);
                if (!c) continue;
                if (worst.offer(den > 0.0 ? num / den : kInfinity, u, v, p, *c)) {
                    verdict.lhs = num;
                    verdict.rhs = lam * den;
                }
            }
        }
    }
    if (worst.found) {
        verdict.holds = false;
        verdict.witness = {pts[worst.extra], pts[worst.a], pts[worst.b], pts[worst.c]};
    }
    return verdict;
}

// Smallest lambda for which check_local_contractive holds; nullopt when 1 or
// more would be required (or no finite lambda works).
template <GSpaceLike S, SelfMapOn<S> M>
std::optional<double> minimal_uniform_lambda(const S& space, const M& map, GValue eps) {
    using P = typename S::point_type;
    if (!(eps >= 0.0)) {
        throw DomainError("eps must be >= 0, got " + format_real(eps));
    }
    require_compatible(space, map);
    const std::vector<P> pts = space.sample();
    const std::vector<P> img = detail::images<S>(map, pts);
    const detail::BallCover cover(space, pts, eps);
    const std::size_t n = pts.size();
    double best = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = u; v < n; ++v) {
            for (std::size_t p = v; p < n; ++p) {
                const GValue num = space.g(img[u], img[v], img[p]);
                if (num == 0.0) continue;
                const GValue den = space.g(pts[u], pts[v], pts[p]);
                if (num / den <= best) continue;
                if (!cover.center(u, v, p)) continue;
                if (den == 0.0) return std::nullopt;
                best = num / den;
            }
        }
    }
    if (best >= 1.0) return std::nullopt;
    return best;
}

// ---------------------------------------------------------------------------
// Sequential a_n conditions

template <class P = PointIndex>
struct SequentialVerdict {
    bool holds = true;
    bool a1_below_half = false;
    double a1 = 0.0;
    std::vector<P> witness;  // (x, y, z) of the first violation
    std::size_t witness_n = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    bool sampled = false;
    std::size_t horizon = 0;
};

namespace detail {

// F(G(T^n x, T^n y, T^n z)) <= F(a_n [G(x,Tx,Tx) + G(y,Ty,Ty) + G(z,Tz,Tz)])
// for sorted sample triples and n = 1..N.
template <GSpaceLike S, SelfMapOn<S> M>
SequentialVerdict<typename S::point_type> sequential_core(const S& space, const M& map, const CoefficientSeq& seq,
                                                          const PhiFunction& phi, std::size_t N) {
    using P = typename S::point_type;
    if (N == 0) {
        throw DomainError("condition depth N must be >= 1");
    }
    require_compatible(space, map);
    const std::vector<P> pts = space.sample();
    const auto orbit = orbit_table<S>(map, pts, N);
    const std::size_t n = pts.size();
    std::vector<GValue> self(n);
    for (std::size_t p = 0; p < n; ++p) self[p] = space.g(pts[p], orbit[p][1], orbit[p][1]);

    SequentialVerdict<P> verdict;
    verdict.sampled = S::sampled;
    verdict.horizon = N;
    verdict.a1 = seq(1);
    verdict.a1_below_half = verdict.a1 < 0.5;
    for (std::size_t step = 1; step <= N; ++step) {
        const double an = seq(step);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                for (std::size_t k = j; k < n; ++k) {
                    const double lhs = phi(space.g(orbit[i][step], orbit[j][step], orbit[k][step]));
                    const double rhs = phi(an * (self[i] + self[j] + self[k]));
                    if (lhs > rhs + kAxiomTolerance) {
                        verdict.holds = false;
                        verdict.witness = {pts[i], pts[j], pts[k]};
                        verdict.witness_n = step;
                        verdict.lhs = lhs;
                        verdict.rhs = rhs;
                        return verdict;
                    }
                }
            }
        }
    }
    return verdict;
}

}  // namespace detail

template <GSpaceLike S, SelfMapOn<S> M>
SequentialVerdict<typename S::point_type> check_sequential_condition(const S& space, const M& map,
                                                                     const CoefficientSeq& seq, std::size_t N) {
    return detail::sequential_core(space, map, seq, PhiFunction::identity(), N);
}

template <GSpaceLike S, SelfMapOn<S> M>
SequentialVerdict<typename S::point_type> check_phi_condition(const S& space, const M& map,
                                                              const CoefficientSeq& seq, const PhiFunction& phi,
                                                              std::size_t N) {
    return detail::sequential_core(space, map, seq, phi, N);
}

// Smallest n <= |X| with T^n constant, if any.
inline std::optional<std::size_t> eventually_constant(const FiniteGSpace& space, const TabulatedMap& map) {
    require_compatible(space, map);
    std::vector<PointIndex> cur(space.size());
    for (PointIndex p = 0; p < cur.size(); ++p) cur[p] = p;
    for (std::size_t n = 0; n <= space.size(); ++n) {
        if (std::all_of(cur.begin(), cur.end(), [&](PointIndex q) { return q == cur.front(); })) {
            return n;
        }
        for (auto& q : cur) q = map(q);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// lambda-sequences under the max metric m(x,y) = max{x,y}

struct LambdaVerdict {
    bool certified = false;
    double lambda = 0.0;
    std::size_t n_lambda = 0;
    std::size_t horizon = 0;
    bool sampled = false;
    bool non_increasing = false;
    // On rejection: the first failing L (link sums) or k (Cesaro means) for
    // the most permissive candidate tried.
    std::optional<std::size_t> witness_L;
    std::optional<std::size_t> witness_k;
};

namespace detail {

inline constexpr std::size_t kLambdaGrid = 20;

struct LambdaScan {
    std::vector<double> link;    // link[L] = sum_{i=1}^{L-1} max(r_i, r_{i+1}), L = 2..h
    std::vector<double> prefix;  // prefix[k] = sum_{i=1}^{k} r_i, k = 1..h
    std::size_t h = 0;

    explicit LambdaScan(const std::vector<double>& r) : link(r.size() + 1, 0.0), prefix(r.size() + 1, 0.0), h(r.size()) {
        for (std::size_t k = 1; k <= h; ++k) prefix[k] = prefix[k - 1] + r[k - 1];
        for (std::size_t L = 2; L <= h; ++L) link[L] = link[L - 1] + std::max(r[L - 2], r[L - 1]);
    }

    std::optional<std::size_t> failing_L(double lam, std::size_t n) const {
        for (std::size_t L = n + 1; L <= h; ++L) {
            if (L >= 2 && link[L] > lam * static_cast<double>(L)) return L;
        }
        return std::nullopt;
    }

    std::optional<std::size_t> failing_k(double lam, std::size_t n) const {
        for (std::size_t k = std::max<std::size_t>(n, 1); k <= h; ++k) {
            if (prefix[k] / static_cast<double>(k) > lam) return k;
        }
        return std::nullopt;
    }

    bool feasible(double lam, std::size_t n) const { return !failing_L(lam, n) && !failing_k(lam, n); }
};

inline double lambda_grid(std::size_t j) { return static_cast<double>(j) / static_cast<double>(kLambdaGrid); }

inline std::vector<double> lambda_terms(const CoefficientSeq& r) {
    if (r.horizon() < 4) {
        throw DomainError("lambda-sequence check needs a horizon of at least 4");
    }
    return r.terms();
}

inline bool is_non_increasing(const std::vector<double>& t) {
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        if (t[i + 1] > t[i]) return false;
    }
    return true;
}

}  // namespace detail

// Canonical certificate: the smallest n(lambda) in [1, h/2] for which some
// grid lambda in {0.05, ..., 0.95} works, and the smallest such lambda.
inline LambdaVerdict lambda_sequence_check(const CoefficientSeq& r) {
    const std::vector<double> terms = detail::lambda_terms(r);
    const detail::LambdaScan scan(terms);
    LambdaVerdict v;
    v.horizon = scan.h;
    v.non_increasing = detail::is_non_increasing(terms);
    for (std::size_t n = 1; n <= scan.h / 2; ++n) {
        for (std::size_t j = 1; j < detail::kLambdaGrid; ++j) {
            const double lam = detail::lambda_grid(j);
            if (scan.feasible(lam, n)) {
                v.certified = true;
                v.lambda = lam;
                v.n_lambda = n;
                return v;
            }
        }
    }
    const double lam = detail::lambda_grid(detail::kLambdaGrid - 1);
    const std::size_t n = scan.h / 2;
    v.lambda = lam;
    v.n_lambda = n;
    v.witness_L = scan.failing_L(lam, n);
    if (!v.witness_L) v.witness_k = scan.failing_k(lam, n);
    return v;
}

// Smallest n(lambda) in [1, h/2] for a fixed lambda in (0,1).
inline LambdaVerdict lambda_sequence_check(const CoefficientSeq& r, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw DomainError("lambda must lie in (0, 1), got " + format_real(lambda));
    }
    const std::vector<double> terms = detail::lambda_terms(r);
    const detail::LambdaScan scan(terms);
    LambdaVerdict v;
    v.horizon = scan.h;
    v.lambda = lambda;
    v.non_increasing = detail::is_non_increasing(terms);
    for (std::size_t n = 1; n <= scan.h / 2; ++n) {
        if (scan.feasible(lambda, n)) {
            v.certified = true;
            v.n_lambda = n;
            return v;
        }
    }
    v.n_lambda = scan.h / 2;
    v.witness_L = scan.failing_L(lambda, v.n_lambda);
    if (!v.witness_L) v.witness_k = scan.failing_k(lambda, v.n_lambda);
    return v;
}

// ---------------------------------------------------------------------------
// Product series sum C_n, C_n = r_1 ... r_n

struct ProductVerdict {
    SeriesVerdict series;
    std::vector<double> products;  // C_1..C_h
    double limsup_surrogate = 0.0;  // sup of r over the last half of the horizon
};

inline ProductVerdict product_series_check(const CoefficientSeq& r) {
    using F = CoefficientSeq::Family;
    if (r.horizon() < 8) {
        throw DomainError("product series check needs a horizon of at least 8");
    }
    const std::vector<double> terms = r.terms();
    ProductVerdict v;
    double c = 1.0;
    for (double t : terms) {
        c *= t;
        v.products.push_back(c);
        v.series.partial_sum += c;
    }
    const std::size_t h = terms.size();
    v.limsup_surrogate = tail_sup(r, h / 2 + 1);

    SeriesVerdict& s = v.series;
    const bool any_zero = std::find(terms.begin(), terms.end(), 0.0) != terms.end();
    if (any_zero && r.family() == F::Tabulated) {
        s.status = SeriesStatus::Convergent;
        s.reason = "product vanishes from a zero term on";
        return v;
    }
    switch (r.family()) {
        case F::Constant:
            s.ratio = r.first_param();
            s.status = r.first_param() < 1.0 ? SeriesStatus::Convergent : SeriesStatus::Divergent;
            s.reason = "C_n = v^n";
            return v;
        case F::Geometric: {
            const double q = r.first_param();
            const double rho = r.second_param();
            const bool conv = q == 0.0 || rho < 1.0 || (rho == 1.0 && q < 1.0);
            s.status = conv ? SeriesStatus::Convergent : SeriesStatus::Divergent;
            s.reason = "C_n = q^n rho^(n(n+1)/2)";
            return v;
        }
        case F::Harmonic:
            s.status = SeriesStatus::Convergent;
            s.reason = "C_n = 1/n!";
            return v;
        case F::InvSqShifted:
            s.status = SeriesStatus::Convergent;
            s.reason = "C_n decays faster than any geometric sequence";
            return v;
        case F::Tabulated: break;
    }
    double max_r = 0.0;
    double min_r = kInfinity;
    for (std::size_t i = h / 2; i < h; ++i) {
        max_r = std::max(max_r, terms[i]);
        min_r = std::min(min_r, terms[i]);
    }
    if (max_r < 1.0) {
        s.status = SeriesStatus::Convergent;
        s.ratio = max_r;
        s.reason = "ratio C_{n+1}/C_n = r_{n+1} < 1 over the tail";
    } else if (min_r >= 1.0) {
        s.status = SeriesStatus::Divergent;
        s.ratio = min_r;
        s.reason = "ratio C_{n+1}/C_n = r_{n+1} >= 1 over the tail";
    } else {
        s.reason = "tail ratios straddle 1";
    }
    return v;
}

// Upper bound for sum_{n >= m} C_n (exact to the horizon, ratio extrapolation beyond).
inline double product_tail_upper(const ProductVerdict& v, std::size_t m) {
    if (v.series.status != SeriesStatus::Convergent) return kInfinity;
    m = std::max<std::size_t>(m, 1);
    const std::size_t h = v.products.size();
    double sum = 0.0;
    for (std::size_t n = m; n <= h; ++n) sum += v.products[n - 1];
    const double last = v.products.back();
    if (last == 0.0) return sum;
    const double rho = v.limsup_surrogate;
    if (rho >= 1.0) return kInfinity;
    const double start = m > h ? last * std::pow(rho, static_cast<double>(m - h)) : last * rho;
    return sum + start / (1.0 - rho);
}

// ---------------------------------------------------------------------------
// Coefficient tensors

struct TensorBoundVerdict {
    bool holds = true;
    std::array<std::size_t, 3> witness{};
    double value = 0.0;  // bound expression at the witness (or the maximum)
};

struct CommonCoefficientVerdict {
    TensorBoundVerdict bound;  // Delta^s + 3 Theta^s + 4 Lambda^s < 1/2
    std::optional<CoefficientSeq> r;
    std::optional<LambdaVerdict> lambda;
};

namespace detail {

inline std::size_t tensor_horizon(std::size_t horizon, std::initializer_list<const CoefficientTensor*> tensors) {
    std::size_t h = horizon;
    for (const CoefficientTensor* t : tensors) {
        if (auto th = t->horizon()) h = std::min(h, *th);
    }
    return h;
}

inline bool all_constant(std::initializer_list<const CoefficientTensor*> tensors) {
    return std::all_of(tensors.begin(), tensors.end(), [](const CoefficientTensor* t) { return t->is_constant(); });
}

}  // namespace detail

// Max over sorted index triples up to horizon of expr(i,j,k); fails when
// the value reaches the limit.
template <class Expr>
TensorBoundVerdict tensor_bound(std::size_t horizon, double limit, Expr expr) {
    TensorBoundVerdict v;
    v.value = -kInfinity;
    for (std::size_t i = 1; i <= horizon; ++i) {
        for (std::size_t j = i; j <= horizon; ++j) {
            for (std::size_t k = j; k <= horizon; ++k) {
                const double e = expr(i, j, k);
                if (e >= limit) {
                    v.holds = false;
                    v.witness = {i, j, k};
                    v.value = e;
                    return v;
                }
                if (e > v.value) {
                    v.value = e;
                    v.witness = {i, j, k};
                }
            }
        }
    }
    return v;
}

// Builds r_i for i = 1..len from rfun; constant tensors give a constant sequence.
template <class RFun>
CoefficientSeq build_r_sequence(bool constant, std::size_t len, RFun rfun) {
    if (len == 0) {
        throw DomainError("tensor horizon too short to form the r-sequence");
    }
    if (constant) {
        return CoefficientSeq::constant(rfun(1), len);
    }
    std::vector<double> values(len);
    for (std::size_t i = 1; i <= len; ++i) values[i - 1] = rfun(i);
    return CoefficientSeq::tabulated(std::move(values));
}

// Delta^s + 3 Theta^s + 4 Lambda^s < 1/2 for all index triples up to
// horizon, and r_i = [Delta^s + 2 Theta^s + 3 Lambda^s] / [1 - Theta^s - Lambda^s]
// at (i, i+1, i+2) fed to lambda_sequence_check.
inline CommonCoefficientVerdict common_coefficient_check(const CoefficientTensor& delta,
                                                         const CoefficientTensor& theta,
                                                         const CoefficientTensor& lamda, std::size_t horizon,
                                                         double s = 1.0) {
    if (horizon == 0) {
        throw DomainError("horizon must be >= 1");
    }
    const std::size_t h = detail::tensor_horizon(horizon, {&delta, &theta, &lamda});
    auto p = [s](double v) { return s == 1.0 ? v : std::pow(v, s); };
    CommonCoefficientVerdict v;
    v.bound = tensor_bound(h, 0.5, [&](std::size_t i, std::size_t j, std::size_t k) {
        return p(delta(i, j, k)) + 3.0 * p(theta(i, j, k)) + 4.0 * p(lamda(i, j, k));
    });
    auto rfun = [&](std::size_t i) {
        const double d = p(delta(i, i + 1, i + 2));
        const double t = p(theta(i, i + 1, i + 2));
        const double l = p(lamda(i, i + 1, i + 2));
        const double den = 1.0 - t - l;
        if (!(den > 0.0)) {
            throw DomainError("denominator 1 - Theta - Lambda is not positive at index " + std::to_string(i));
        }
        return (d + 2.0 * t + 3.0 * l) / den;
    };
    const bool constant = detail::all_constant({&delta, &theta, &lamda});
    const std::size_t len = constant ? horizon : (h >= 3 ? h - 2 : 0);
    v.r = build_r_sequence(constant, len, rfun);
    if (v.r->horizon() >= 4) {
        v.lambda = lambda_sequence_check(*v.r);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Tensor contraction conditions for single maps. With Delta, Gamma and F:
//   DeltaGamma:    F(G(T^i x, T^j y, T^k z)) <= F(D [G(x,T^i x,T^i x) + G(y,T^j y,T^j y) + G(z,T^k z,T^k z)])
//                                              + F(Gm G(x,y,z))
//   DeltaWithSelf: F(...) <= F(D [G(x,T^i x,T^i x) + G(y,T^j y,T^j y) + G(z,T^k z,T^k z) + G(x,y,z)])
//   DeltaOnly:     F(...) <= F(D [G(x,T^i x,T^i x) + G(y,T^j y,T^j y) + G(z,T^k z,T^k z)])
// for x != y and i, j, k = 1..N, with D = Delta(i,j,k), Gm = Gamma(i,j,k).

enum class TensorForm { DeltaGamma, DeltaWithSelf, DeltaOnly };

template <class P = PointIndex>
struct TensorConditionVerdict {
    bool holds = true;
    std::vector<P> witness;              // (x, y, z)
    std::array<std::size_t, 3> indices{};  // (i, j, k)
    double lhs = 0.0;
    double rhs = 0.0;
    bool sampled = false;
    std::size_t horizon = 0;
};

template <GSpaceLike S, SelfMapOn<S> M>
TensorConditionVerdict<typename S::point_type> check_tensor_condition(
    const S& space, const M& map, TensorForm form, const CoefficientTensor& delta, const CoefficientTensor* gamma,
    const PhiFunction& phi, std::size_t N, std::size_t max_points = 33) {
    using P = typename S::point_type;
    if (N == 0) {
        throw DomainError("condition depth N must be >= 1");
    }
    if (form == TensorForm::DeltaGamma && gamma == nullptr) {
        throw DomainError("this condition needs a Gamma tensor");
    }
    require_compatible(space, map);
    const std::vector<P> pts = S::sampled ? detail::subsample(space.sample(), max_points) : space.sample();
    const auto orbit = detail::orbit_table<S>(map, pts, N);
    const std::size_t n = pts.size();

    TensorConditionVerdict<P> v;
    v.sampled = S::sampled;
    v.horizon = N;
    for (std::size_t i = 1; i <= N; ++i) {
        for (std::size_t j = 1; j <= N; ++j) {
            for (std::size_t k = 1; k <= N; ++k) {
                const double d = delta(i, j, k);
                const double gm = form == TensorForm::DeltaGamma ? (*gamma)(i, j, k) : 0.0;
                for (std::size_t x = 0; x < n; ++x) {
                    const GValue sx = space.g(pts[x], orbit[x][i], orbit[x][i]);
                    for (std::size_t y = 0; y < n; ++y) {
                        if (x == y) continue;
                        const GValue sy = space.g(pts[y], orbit[y][j], orbit[y][j]);
                        for (std::size_t z = 0; z < n; ++z) {
                            const GValue sz = space.g(pts[z], orbit[z][k], orbit[z][k]);
                            const GValue gxyz = space.g(pts[x], pts[y], pts[z]);
                            const double lhs = phi(space.g(orbit[x][i], orbit[y][j], orbit[z][k]));
                            double rhs = 0.0;
                            switch (form) {
                                case TensorForm::DeltaGamma: rhs = phi(d * (sx + sy + sz)) + phi(gm * gxyz); break;
                                case TensorForm::DeltaWithSelf: rhs = phi(d * (sx + sy + sz + gxyz)); break;
                                case TensorForm::DeltaOnly: rhs = phi(d * (sx + sy + sz)); break;
                            }
                            if (lhs > rhs + kAxiomTolerance) {
                                v.holds = false;
                                v.witness = {pts[x], pts[y], pts[z]};
                                v.indices = {i, j, k};
                                v.lhs = lhs;
                                v.rhs = rhs;
                                return v;
                            }
                        }
                    }
                }
            }
        }
    }
    return v;
}

// Family condition with T_i = maps[(i-1) mod M]:
//   F(G(T_i x, T_j y, T_k z)) <= F(D G(x,y,z) + Th [G(T_i x,x,x) + G(y,T_j y,y) + G(z,z,T_k z)]
//                                  + L [G(T_i x,y,z) + G(x,T_j y,z) + G(x,y,T_k z)])
// for all x, y, z and i, j, k = 1..N.
template <GSpaceLike S, SelfMapOn<S> M>
TensorConditionVerdict<typename S::point_type> check_common_condition(
    const S& space, std::span<const M> maps, const CoefficientTensor& delta, const CoefficientTensor& theta,
    const CoefficientTensor& lamda, const PhiFunction& phi, std::size_t N, std::size_t max_points = 33) {
    using P = typename S::point_type;
    if (N == 0) {
        throw DomainError("condition depth N must be >= 1");
    }
    if (maps.empty()) {
        throw DomainError("map family is empty");
    }
    for (const M& m : maps) require_compatible(space, m);
    const std::vector<P> pts = S::sampled ? detail::subsample(space.sample(), max_points) : space.sample();
    const std::size_t n = pts.size();
    std::vector<std::vector<P>> img(maps.size());
    for (std::size_t t = 0; t < maps.size(); ++t) img[t] = detail::images<S>(maps[t], pts);

    TensorConditionVerdict<P> v;
    v.sampled = S::sampled;
    v.horizon = N;
    for (std::size_t i = 1; i <= N; ++i) {
        const auto& ti = img[(i - 1) % maps.size()];
        for (std::size_t j = 1; j <= N; ++j) {
            const auto& tj = img[(j - 1) % maps.size()];
            for (std::size_t k = 1; k <= N; ++k) {
                const auto& tk = img[(k - 1) % maps.size()];
                const double d = delta(i, j, k);
                const double th = theta(i, j, k);
                const double la = lamda(i, j, k);
                for (std::size_t x = 0; x < n; ++x) {
                    for (std::size_t y = 0; y < n; ++y) {
                        for (std::size_t z = 0; z < n; ++z) {
                            const P &X = pts[x], &Y = pts[y], &Z = pts[z];
                            const double lhs = phi(space.g(ti[x], tj[y], tk[z]));
                            const double inner = d * space.g(X, Y, Z) +
                                                 th * (space.g(ti[x], X, X) + space.g(Y, tj[y], Y) +
                                                       space.g(Z, Z, tk[z])) +
                                                 la * (space.g(ti[x], Y, Z) + space.g(X, tj[y], Z) +
                                                       space.g(X, Y, tk[z]));
                            const double rhs = phi(inner);
                            if (lhs > rhs + kAxiomTolerance) {
                                v.holds = false;
                                v.witness = {X, Y, Z};
                                v.indices = {i, j, k};
                                v.lhs = lhs;
                                v.rhs = rhs;
                                return v;
                            }
                        }
                    }
                }
            }
        }
    }
    return v;
}

// sup of G over triples of the given points (orbit boundedness surrogate).
template <GSpaceLike S>
GValue points_diameter(const S& space, const std::vector<typename S::point_type>& pts) {
    GValue best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i; j < pts.size(); ++j) {
            for (std::size_t k = j; k < pts.size(); ++k) {
                best = std::max(best, space.g(pts[i], pts[j], pts[k]));
            }
        }
    }
    return best;
}

}  // namespace gfix
