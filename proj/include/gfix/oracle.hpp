#pragma once

// Brute-force ground truth for finite spaces. Deliberately independent of
// analysis.hpp and solver.hpp: the only thing shared is G itself.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gfix/error.hpp"
#include "gfix/gspace.hpp"
#include "gfix/maps.hpp"

namespace gfix {

struct OracleResult {
    std::set<PointIndex> fixed_points;
    bool unique = false;
    std::string method = "exhaustive";
};

namespace oracle_detail {

inline void check_map(const FiniteGSpace& space, const TabulatedMap& map) {
    if (map.image.size() != space.size()) {
        throw DomainError("oracle: map size does not match the space");
    }
    for (PointIndex q : map.image) {
        if (q >= space.size()) throw DomainError("oracle: map leaves the space");
    }
}

}  // namespace oracle_detail

inline OracleResult brute_fixed_points(const FiniteGSpace& space, const TabulatedMap& map) {
    oracle_detail::check_map(space, map);
    OracleResult r;
    for (PointIndex p = 0; p < space.size(); ++p) {
        if (map.image[p] == p) r.fixed_points.insert(p);
    }
    r.unique = r.fixed_points.size() == 1;
    return r;
}

inline OracleResult brute_fixed_points(const AnalyticGSpace&, const AffineMap&) {
    throw UnsupportedError("the oracle enumerates finite spaces only");
}

// Points fixed by T_1, ..., T_horizon with T_i = maps[(i-1) mod M].
inline OracleResult brute_common_fixed_points(const FiniteGSpace& space, std::span<const TabulatedMap> maps,
                                              std::size_t horizon) {
    if (maps.empty()) throw DomainError("oracle: empty map family");
    if (horizon == 0) throw DomainError("oracle: horizon must be >= 1");
    for (const TabulatedMap& m : maps) oracle_detail::check_map(space, m);
    OracleResult r;
    for (PointIndex p = 0; p < space.size(); ++p) {
        bool common = true;
        for (std::size_t i = 1; i <= horizon && common; ++i) {
            common = maps[(i - 1) % maps.size()].image[p] == p;
        }
        if (common) r.fixed_points.insert(p);
    }
    r.unique = r.fixed_points.size() == 1;
    return r;
}

inline OracleResult brute_common_fixed_points(const AnalyticGSpace&, std::span<const AffineMap>, std::size_t) {
    throw UnsupportedError("the oracle enumerates finite spaces only");
}

struct OracleLipschitz {
    bool bounded = true;
    double value = 0.0;
};

// Collects every ratio over all ordered triples, sorts, takes the largest.
inline OracleLipschitz brute_lipschitz(const FiniteGSpace& space, const TabulatedMap& map) {
    oracle_detail::check_map(space, map);
    const std::size_t n = space.size();
    std::vector<double> ratios;
    ratios.reserve(n * n * n);
    for (PointIndex x = 0; x < n; ++x) {
        for (PointIndex y = 0; y < n; ++y) {
            for (PointIndex z = 0; z < n; ++z) {
                const double den = g_eval(space, x, y, z);
                const double num = g_eval(space, map.image[x], map.image[y], map.image[z]);
                if (den > 0.0) {
                    ratios.push_back(num / den);
                } else if (num > 0.0) {
                    return {false, std::numeric_limits<double>::infinity()};
                }
            }
        }
    }
    if (ratios.empty()) return {true, 0.0};
    std::sort(ratios.begin(), ratios.end());
    return {true, ratios.back()};
}

struct CauchyCheck {
    double eps = 0.0;
    std::optional<std::size_t> N;  // least N with G(x_n, x_m, x_m) < eps for all n, m >= N
};

struct CauchyVerdict {
    std::vector<CauchyCheck> checks;
    bool all_found() const {
        return std::all_of(checks.begin(), checks.end(), [](const CauchyCheck& c) { return c.N.has_value(); });
    }
};

// Pairwise scan of the trace points. Unless the trace converged, the last
// point alone is no evidence, so N must leave at least two points.
template <GSpaceLike S, class Trace>
CauchyVerdict verify_cauchy(const S& space, const Trace& trace, std::span<const double> eps_grid) {
    const auto& pts = trace.points;
    if (pts.empty()) throw DomainError("verify_cauchy needs a nonempty trace");
    for (double e : eps_grid) {
        if (!(e > 0.0)) throw DomainError("eps values must be > 0");
    }
    const std::size_t len = pts.size();
    // spread[N] = max over n, m >= N of G(x_n, x_m, x_m)
    std::vector<double> spread(len + 1, 0.0);
    for (std::size_t N = len; N-- > 0;) {
        double best = spread[N + 1];
        for (std::size_t m = N; m < len; ++m) {
            best = std::max(best, g_eval(space, pts[N], pts[m], pts[m]));
            best = std::max(best, g_eval(space, pts[m], pts[N], pts[N]));
        }
        spread[N] = best;
    }
    const std::size_t last_allowed = (trace.converged || len == 1) ? len - 1 : len - 2;
    CauchyVerdict v;
    for (double e : eps_grid) {
        CauchyCheck c{e, std::nullopt};
        for (std::size_t N = 0; N <= last_allowed; ++N) {
            if (spread[N] < e) {
                c.N = N;
                break;
            }
        }
        v.checks.push_back(c);
    }
    return v;
}

}  // namespace gfix
