#pragma once

// G-metric type spaces: a point set X, a ternary distance G on X and a
// relaxation constant K >= 1 for the polygon inequality (G5).
//
// Two concrete representations are provided. FiniteGSpace stores a full
// table keyed by sorted index triples, so symmetry under argument
// permutation holds by construction. AnalyticGSpace evaluates a builtin
// closed form on an interval and exposes a uniform sampling grid; every
// verdict computed from that grid is a sampled verdict.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "gfix/error.hpp"

namespace gfix {

using GValue = double;
using PointIndex = std::size_t;

// Absolute tolerance for equalities and inequalities in axiom checks.
inline constexpr double kAxiomTolerance = 1e-12;

inline std::string format_real(double v) {
    std::array<char, 64> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) {
        return std::to_string(v);
    }
    return std::string(buf.data(), end);
}

template <class S>
concept GSpaceLike = requires(const S& s, const typename S::point_type& p) {
    typename S::point_type;
    { s.g(p, p, p) } -> std::convertible_to<GValue>;
    { s.k() } -> std::convertible_to<double>;
    { s.sample() } -> std::convertible_to<std::vector<typename S::point_type>>;
    { s.contains(p) } -> std::convertible_to<bool>;
    { s.describe(p) } -> std::convertible_to<std::string>;
    { S::sampled } -> std::convertible_to<bool>;
};

class FiniteGSpace {
public:
    using point_type = PointIndex;
    static constexpr bool sampled = false;

    struct Entry {
        PointIndex i = 0;
        PointIndex j = 0;
        PointIndex k = 0;
        GValue value = 0.0;
    };

    FiniteGSpace(std::vector<std::string> labels, double K, std::span<const Entry> entries)
        : labels_(std::move(labels)), k_(K) {
        const std::size_t n = labels_.size();
        if (n == 0) {
            throw DomainError("a G-metric type space needs at least one point");
        }
        if (!std::isfinite(K) || K < 1.0) {
            throw DomainError("relaxation constant K must be finite and >= 1, got " + format_real(K));
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (labels_[i].empty()) {
                throw DomainError("point " + std::to_string(i) + " has an empty label");
            }
            auto [it, inserted] = index_.emplace(labels_[i], i);
            if (!inserted) {
                throw DomainError("duplicate point label '" + labels_[i] + "'");
            }
        }

        constexpr GValue unset = -1.0;
        table_.assign(n * n * n, unset);
        std::vector<std::array<PointIndex, 3>> origin(n * n * n);
        for (const Entry& e : entries) {
            if (e.i >= n || e.j >= n || e.k >= n) {
                throw DomainError("triple (" + std::to_string(e.i) + "," + std::to_string(e.j) + "," +
                                  std::to_string(e.k) + ") references a point outside the space");
            }
            if (!std::isfinite(e.value) || e.value < 0.0) {
                throw DomainError("G(" + std::to_string(e.i) + "," + std::to_string(e.j) + "," +
                                  std::to_string(e.k) + ") = " + format_real(e.value) +
                                  " is not a finite non-negative value");
            }
            std::array<PointIndex, 3> key{e.i, e.j, e.k};
            std::sort(key.begin(), key.end());
            const std::size_t slot = offset(key[0], key[1], key[2]);
            if (table_[slot] != unset) {
                const auto& prev = origin[slot];
                if (table_[slot] != e.value) {
                    throw DomainError("G4 violated: G(" + std::to_string(prev[0]) + "," +
                                      std::to_string(prev[1]) + "," + std::to_string(prev[2]) +
                                      ") = " + format_real(table_[slot]) + " but G(" +
                                      std::to_string(e.i) + "," + std::to_string(e.j) + "," +
                                      std::to_string(e.k) + ") = " + format_real(e.value));
                }
                throw DomainError("duplicate entry for triple (" + std::to_string(key[0]) + "," +
                                  std::to_string(key[1]) + "," + std::to_string(key[2]) + ")");
            }
            table_[slot] = e.value;
            origin[slot] = {e.i, e.j, e.k};
        }

        for (PointIndex a = 0; a < n; ++a) {
            for (PointIndex b = a; b < n; ++b) {
                for (PointIndex c = b; c < n; ++c) {
                    const GValue v = table_[offset(a, b, c)];
                    if (v == unset) {
                        throw DomainError("missing triple (" + std::to_string(a) + "," +
                                          std::to_string(b) + "," + std::to_string(c) + ")");
                    }
                    for (const auto& p : permutations(a, b, c)) {
                        table_[offset(p[0], p[1], p[2])] = v;
                    }
                }
            }
        }
    }

    std::size_t size() const noexcept { return labels_.size(); }
    double k() const noexcept { return k_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    const std::string& label(PointIndex p) const {
        if (p >= size()) {
            throw LookupError("point index " + std::to_string(p) + " out of range");
        }
        return labels_[p];
    }

    PointIndex index_of(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) {
            throw LookupError("unknown point '" + std::string(name) + "'");
        }
        return it->second;
    }

    bool contains(PointIndex p) const noexcept { return p < size(); }

    // Unchecked lookup; callers validate indices at the boundary.
    GValue g(PointIndex a, PointIndex b, PointIndex c) const noexcept {
        return table_[offset(a, b, c)];
    }

    std::vector<PointIndex> sample() const {
        std::vector<PointIndex> pts(size());
        for (PointIndex i = 0; i < pts.size(); ++i) {
            pts[i] = i;
        }
        return pts;
    }

    std::string describe(PointIndex p) const { return label(p); }

    // Canonical (sorted) triples in lexicographic order.
    std::vector<Entry> entries() const {
        std::vector<Entry> out;
        const std::size_t n = size();
        for (PointIndex a = 0; a < n; ++a) {
            for (PointIndex b = a; b < n; ++b) {
                for (PointIndex c = b; c < n; ++c) {
                    out.push_back({a, b, c, g(a, b, c)});
                }
            }
        }
        return out;
    }

private:
    std::size_t offset(PointIndex a, PointIndex b, PointIndex c) const noexcept {
        const std::size_t n = labels_.size();
        return (a * n + b) * n + c;
    }

    static std::array<std::array<PointIndex, 3>, 6> permutations(PointIndex a, PointIndex b, PointIndex c) {
        return {{{a, b, c}, {a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}}};
    }

    std::vector<std::string> labels_;
    double k_;
    std::vector<GValue> table_;
    std::unordered_map<std::string, PointIndex> index_;
};

enum class AnalyticFamily {
    IntervalMaxVal,   // G(x,y,z) = max{x,y,z}
    IntervalMaxDiff,  // G(x,y,z) = max{|x-y|,|y-z|,|z-x|}
};

inline std::string_view family_name(AnalyticFamily f) {
    return f == AnalyticFamily::IntervalMaxVal ? "interval-maxval" : "interval-maxdiff";
}

inline AnalyticFamily parse_family(std::string_view name) {
    if (name == "interval-maxval") return AnalyticFamily::IntervalMaxVal;
    if (name == "interval-maxdiff") return AnalyticFamily::IntervalMaxDiff;
    throw DomainError("unknown analytic family '" + std::string(name) + "'");
}

class AnalyticGSpace {
public:
    using point_type = double;
    static constexpr bool sampled = true;

    AnalyticGSpace(AnalyticFamily family, double lo, double hi, std::size_t grid_n)
        : family_(family), lo_(lo), hi_(hi), grid_n_(grid_n) {
        if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
            throw DomainError("analytic space needs finite lo < hi");
        }
        if (grid_n < 2) {
            throw DomainError("grid_n must be at least 2");
        }
        if (family == AnalyticFamily::IntervalMaxVal && lo < 0.0) {
            throw DomainError("interval-maxval needs lo >= 0 so that G is non-negative");
        }
    }

    AnalyticFamily family() const noexcept { return family_; }
    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    std::size_t grid_n() const noexcept { return grid_n_; }
    double k() const noexcept { return 1.0; }

    bool contains(double x) const noexcept { return x >= lo_ && x <= hi_; }

    GValue g(double x, double y, double z) const noexcept {
        if (family_ == AnalyticFamily::IntervalMaxVal) {
            return std::max({x, y, z});
        }
        return std::max({std::abs(x - y), std::abs(y - z), std::abs(z - x)});
    }

    // Uniform grid of grid_n points with both endpoints exact.
    std::vector<double> sample() const { return grid(grid_n_); }

    std::vector<double> grid(std::size_t n) const {
        std::vector<double> pts(n);
        for (std::size_t i = 0; i < n; ++i) {
            pts[i] = lo_ + (hi_ - lo_) * static_cast<double>(i) / static_cast<double>(n - 1);
        }
        pts.front() = lo_;
        pts.back() = hi_;
        return pts;
    }

    std::string describe(double x) const { return format_real(x); }

private:
    AnalyticFamily family_;
    double lo_;
    double hi_;
    std::size_t grid_n_;
};

using GSpace = std::variant<FiniteGSpace, AnalyticGSpace>;

template <GSpaceLike S>
void require_point(const S& space, const typename S::point_type& p) {
    if (!space.contains(p)) {
        throw LookupError("point " + format_real(static_cast<double>(p)) + " is not in the space");
    }
}

// G(x,y,z) with membership checks; identical under all argument permutations.
template <GSpaceLike S>
GValue g_eval(const S& space, const typename S::point_type& x, const typename S::point_type& y,
              const typename S::point_type& z) {
    require_point(space, x);
    require_point(space, y);
    require_point(space, z);
    return space.g(x, y, z);
}

inline GValue g_eval(const FiniteGSpace& space, std::string_view x, std::string_view y, std::string_view z) {
    return space.g(space.index_of(x), space.index_of(y), space.index_of(z));
}

// d_G(x,y) = G(x,y,y) + G(x,x,y).
template <GSpaceLike S>
GValue derived_metric(const S& space, const typename S::point_type& x, const typename S::point_type& y) {
    require_point(space, x);
    require_point(space, y);
    return space.g(x, y, y) + space.g(x, x, y);
}

// Unchecked variant for hot loops.
template <GSpaceLike S>
GValue derived_metric_unchecked(const S& space, const typename S::point_type& x, const typename S::point_type& y) {
    return space.g(x, y, y) + space.g(x, x, y);
}

enum class Axiom { G1, G2, G3, G4, G5, G5Prime };

inline constexpr std::array<Axiom, 6> kAllAxioms{Axiom::G1, Axiom::G2, Axiom::G3,
                                                  Axiom::G4, Axiom::G5, Axiom::G5Prime};

inline std::string_view axiom_name(Axiom a) {
    switch (a) {
        case Axiom::G1: return "G1";
        case Axiom::G2: return "G2";
        case Axiom::G3: return "G3";
        case Axiom::G4: return "G4";
        case Axiom::G5: return "G5";
        case Axiom::G5Prime: return "G5'";
    }
    return "?";
}

// Witness layout on failure:
//   G1: (x,x,x)   lhs = G(x,x,x)            rhs = 0
//   G2: (x,x,y)   lhs = G(x,x,y)            rhs = 0
//   G3: (x,y,z)   lhs = G(x,x,y)            rhs = G(x,y,z)
//   G5: (x,y,z,z1..zn)  lhs = G(x,y,z)      rhs = K * chain sum
//   G5': (x,y,z,z1)     lhs = G(x,y,z)      rhs = K * (G(x,z1,z1) + G(z1,y,z))
struct AxiomVerdict {
    Axiom axiom = Axiom::G1;
    bool holds = true;
    std::vector<PointIndex> witness;
    GValue lhs = 0.0;
    GValue rhs = 0.0;
};

struct AxiomReport {
    std::array<AxiomVerdict, 6> verdicts{};
    std::size_t g5_chain_cutoff = 0;

    const AxiomVerdict& operator[](Axiom a) const { return verdicts[static_cast<std::size_t>(a)]; }
    AxiomVerdict& operator[](Axiom a) { return verdicts[static_cast<std::size_t>(a)]; }

    bool all_hold() const {
        return std::all_of(verdicts.begin(), verdicts.end(), [](const AxiomVerdict& v) { return v.holds; });
    }

    // G1-G4 plus the requested polygon inequality.
    bool holds_with(Axiom polygon) const {
        for (Axiom a : {Axiom::G1, Axiom::G2, Axiom::G3, Axiom::G4, polygon}) {
            if (!(*this)[a].holds) return false;
        }
        return true;
    }
};

namespace detail {

struct PolygonSearch {
    const FiniteGSpace& space;
    PointIndex x, y, z;
    GValue target;
    std::size_t cutoff;
    std::vector<PointIndex> chain;
    std::vector<char> used;
    GValue violation_rhs = 0.0;

    // partial = G(x,z1,z1) + ... + G(z_{m-1},z_m,z_m) for the current chain.
    bool extend(GValue partial) {
        const double K = space.k();
        if (K * partial + kAxiomTolerance >= target) {
            return false;  // every completion is at least K * partial
        }
        const PointIndex last = chain.empty() ? x : chain.back();
        for (PointIndex w = 0; w < space.size(); ++w) {
            if (used[w]) continue;
            const GValue linked = partial + space.g(last, w, w);
            const GValue total = linked + space.g(w, y, z);
            chain.push_back(w);
            used[w] = 1;
            if (target > K * total + kAxiomTolerance) {
                violation_rhs = K * total;
                return true;
            }
            if (chain.size() < cutoff && extend(linked)) {
                return true;
            }
            chain.pop_back();
            used[w] = 0;
        }
        return false;
    }
};

}  // namespace detail

// G1-G3 exhaustively; G4 is structural; G5 over every chain of pairwise
// distinct intermediates z1..zn with n <= g5_chain_cutoff; G5' over every
// single intermediate. The first violating (x,y,z) in lexicographic order is
// kept, with a shortest violating chain.
inline AxiomReport validate_axioms(const FiniteGSpace& space, std::size_t g5_chain_cutoff) {
    const std::size_t n = space.size();
    if (g5_chain_cutoff == 0 || g5_chain_cutoff > n) {
        throw DomainError("g5_chain_cutoff must be in [1, " + std::to_string(n) + "]");
    }
    AxiomReport report;
    report.g5_chain_cutoff = g5_chain_cutoff;
    for (Axiom a : kAllAxioms) {
        report[a].axiom = a;
    }

    auto fail = [&](Axiom a, std::vector<PointIndex> w, GValue lhs, GValue rhs) {
        AxiomVerdict& v = report[a];
        if (!v.holds) return;
        v.holds = false;
        v.witness = std::move(w);
        v.lhs = lhs;
        v.rhs = rhs;
    };

    for (PointIndex x = 0; x < n; ++x) {
        const GValue v = space.g(x, x, x);
        if (std::abs(v) > kAxiomTolerance) {
            fail(Axiom::G1, {x, x, x}, v, 0.0);
            break;
        }
    }

    for (PointIndex x = 0; x < n && report[Axiom::G2].holds; ++x) {
        for (PointIndex y = 0; y < n; ++y) {
            if (x == y) continue;
            const GValue v = space.g(x, x, y);
            if (!(v > kAxiomTolerance)) {
                fail(Axiom::G2, {x, x, y}, v, 0.0);
                break;
            }
        }
    }

    for (PointIndex x = 0; x < n && report[Axiom::G3].holds; ++x) {
        for (PointIndex y = 0; y < n && report[Axiom::G3].holds; ++y) {
            const GValue lhs = space.g(x, x, y);
            for (PointIndex z = 0; z < n; ++z) {
                if (z == y) continue;
                const GValue rhs = space.g(x, y, z);
                if (lhs > rhs + kAxiomTolerance) {
                    fail(Axiom::G3, {x, y, z}, lhs, rhs);
                    break;
                }
            }
        }
    }

    const double K = space.k();
    for (PointIndex x = 0; x < n && report[Axiom::G5Prime].holds; ++x) {
        for (PointIndex y = 0; y < n && report[Axiom::G5Prime].holds; ++y) {
            for (PointIndex z = 0; z < n && report[Axiom::G5Prime].holds; ++z) {
                const GValue lhs = space.g(x, y, z);
                for (PointIndex w = 0; w < n; ++w) {
                    const GValue rhs = K * (space.g(x, w, w) + space.g(w, y, z));
                    if (lhs > rhs + kAxiomTolerance) {
                        fail(Axiom::G5Prime, {x, y, z, w}, lhs, rhs);
                        break;
                    }
                }
            }
        }
    }

    for (PointIndex x = 0; x < n && report[Axiom::G5].holds; ++x) {
        for (PointIndex y = 0; y < n && report[Axiom::G5].holds; ++y) {
            for (PointIndex z = 0; z < n && report[Axiom::G5].holds; ++z) {
                // Iterative deepening so the witness chain is a shortest one.
                for (std::size_t len = 1; len <= g5_chain_cutoff && report[Axiom::G5].holds; ++len) {
                    detail::PolygonSearch search{space, x, y, z, space.g(x, y, z), len, {}, {}};
                    search.used.assign(n, 0);
                    if (search.extend(0.0)) {
                        std::vector<PointIndex> w{x, y, z};
                        w.insert(w.end(), search.chain.begin(), search.chain.end());
                        fail(Axiom::G5, std::move(w), search.target, search.violation_rhs);
                    }
                }
            }
        }
    }
    return report;
}

inline AxiomReport validate_axioms(const FiniteGSpace& space) {
    return validate_axioms(space, space.size() > 1 ? space.size() - 1 : 1);
}

// Tabulates an analytic space on an n-point sub-grid (endpoints included);
// labels are the grid values.
inline FiniteGSpace tabulate(const AnalyticGSpace& space, std::size_t n) {
    if (n < 2) {
        throw DomainError("tabulation needs at least 2 grid points");
    }
    const std::vector<double> pts = space.grid(n);
    std::vector<std::string> labels;
    labels.reserve(n);
    for (double p : pts) {
        labels.push_back(format_real(p));
    }
    std::vector<FiniteGSpace::Entry> entries;
    for (PointIndex a = 0; a < n; ++a) {
        for (PointIndex b = a; b < n; ++b) {
            for (PointIndex c = b; c < n; ++c) {
                entries.push_back({a, b, c, space.g(pts[a], pts[b], pts[c])});
            }
        }
    }
    return FiniteGSpace(std::move(labels), space.k(), entries);
}

// Sampled axiom validation for analytic families: the space is tabulated on
// at most max_points grid points and validated as a finite space.
struct SampledAxiomReport {
    FiniteGSpace grid;
    AxiomReport report;
};

inline SampledAxiomReport validate_axioms(const AnalyticGSpace& space, std::size_t g5_chain_cutoff,
                                          std::size_t max_points = 17) {
    FiniteGSpace grid = tabulate(space, std::min(space.grid_n(), max_points));
    AxiomReport report = validate_axioms(grid, std::min(g5_chain_cutoff, grid.size()));
    return {std::move(grid), std::move(report)};
}

inline GValue diameter(const FiniteGSpace& space) {
    if (space.size() == 0) {
        throw DomainError("diameter of an empty space");
    }
    GValue d = 0.0;
    for (const auto& e : space.entries()) {
        d = std::max(d, e.value);
    }
    return d;
}

// Supremum over the sampling grid.
inline GValue diameter(const AnalyticGSpace& space) {
    const auto pts = space.sample();
    GValue d = 0.0;
    for (std::size_t a = 0; a < pts.size(); ++a) {
        for (std::size_t b = a; b < pts.size(); ++b) {
            for (std::size_t c = b; c < pts.size(); ++c) {
                d = std::max(d, space.g(pts[a], pts[b], pts[c]));
            }
        }
    }
    return d;
}

namespace examples {

// G = 0 on the diagonal, 1 otherwise.
inline FiniteGSpace discrete(std::size_t n) {
    if (n == 0) {
        throw DomainError("discrete space needs at least one point");
    }
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(std::to_string(i));
    }
    std::vector<FiniteGSpace::Entry> entries;
    for (PointIndex a = 0; a < n; ++a) {
        for (PointIndex b = a; b < n; ++b) {
            for (PointIndex c = b; c < n; ++c) {
                entries.push_back({a, b, c, (a == b && b == c) ? 0.0 : 1.0});
            }
        }
    }
    return FiniteGSpace(std::move(labels), 1.0, entries);
}

// X = {0,1}: G(0,0,1) = 1, G(0,1,1) = 2.
inline FiniteGSpace two_point() {
    const std::vector<FiniteGSpace::Entry> entries{
        {0, 0, 0, 0.0}, {1, 1, 1, 0.0}, {0, 0, 1, 1.0}, {0, 1, 1, 2.0}};
    return FiniteGSpace({"0", "1"}, 1.0, entries);
}

// X = {0,1,2}: G(0,0,1) = G(0,1,1) = 1, every triple touching 2 is 2.
inline FiniteGSpace three_point() {
    const std::vector<FiniteGSpace::Entry> entries{
        {0, 0, 0, 0.0}, {1, 1, 1, 0.0}, {2, 2, 2, 0.0}, {0, 0, 1, 1.0}, {0, 1, 1, 1.0},
        {0, 0, 2, 2.0}, {1, 1, 2, 2.0}, {0, 2, 2, 2.0}, {1, 2, 2, 2.0}, {0, 1, 2, 2.0}};
    return FiniteGSpace({"0", "1", "2"}, 1.0, entries);
}

inline constexpr std::size_t kDefaultGrid = 257;

inline AnalyticGSpace interval_maxval(std::size_t grid_n = kDefaultGrid) {
    return AnalyticGSpace(AnalyticFamily::IntervalMaxVal, 0.0, 1.0, grid_n);
}

inline AnalyticGSpace interval_maxdiff(std::size_t grid_n = kDefaultGrid) {
    return AnalyticGSpace(AnalyticFamily::IntervalMaxDiff, 0.0, 1.0, grid_n);
}

}  // namespace examples

// Names: discrete(n), two_point, three_point, interval_maxval, interval_maxdiff.
inline GSpace make_example(std::string_view name) {
    if (name == "two_point") return examples::two_point();
    if (name == "three_point") return examples::three_point();
    if (name == "interval_maxval") return examples::interval_maxval();
    if (name == "interval_maxdiff") return examples::interval_maxdiff();
    constexpr std::string_view prefix = "discrete(";
    if (name.size() > prefix.size() + 1 && name.substr(0, prefix.size()) == prefix && name.back() == ')') {
        const std::string_view digits = name.substr(prefix.size(), name.size() - prefix.size() - 1);
        std::size_t n = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && n > 0) {
            return examples::discrete(n);
        }
    }
    throw DomainError("unknown example space '" + std::string(name) + "'");
}

}  // namespace gfix
