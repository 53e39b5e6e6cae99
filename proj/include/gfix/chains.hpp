#pragma once

// epsilon-chainability. A chain from x to y is a sequence of pairwise
// distinct points x = x0, x1, ..., xn = y whose links satisfy
// G(x_i, x_{i+1}, x_{i+1}) <= epsilon. Links are directed: G(u,v,v) and
// G(v,u,u) are different table entries.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "gfix/error.hpp"
#include "gfix/gspace.hpp"

namespace gfix {

template <class P = PointIndex>
struct Chain {
    std::vector<P> nodes;
    GValue epsilon = 0.0;

    std::size_t degree() const noexcept { return nodes.empty() ? 0 : nodes.size() - 1; }
};

template <class P = PointIndex>
struct ChainabilityVerdict {
    bool chainable = false;
    GValue epsilon = 0.0;
    std::map<std::pair<P, P>, Chain<P>> witness_chains;
    std::optional<std::pair<P, P>> blocking_pair;
    std::size_t max_degree = 0;
};

namespace detail {

inline constexpr std::size_t kUnreachable = std::numeric_limits<std::size_t>::max();

class LinkGraph {
public:
    template <GSpaceLike S>
    LinkGraph(const S& space, const std::vector<typename S::point_type>& pts, GValue eps)
        : n_(pts.size()), adj_(n_ * n_, 0) {
        for (std::size_t u = 0; u < n_; ++u) {
            for (std::size_t v = 0; v < n_; ++v) {
                adj_[u * n_ + v] = (u != v && space.g(pts[u], pts[v], pts[v]) <= eps) ? 1 : 0;
            }
        }
    }

    std::size_t size() const noexcept { return n_; }
    bool edge(std::size_t u, std::size_t v) const noexcept { return adj_[u * n_ + v] != 0; }

    // Link counts from every vertex to target (reverse BFS).
    std::vector<std::size_t> distances_to(std::size_t target) const {
        std::vector<std::size_t> dist(n_, kUnreachable);
        std::queue<std::size_t> q;
        dist[target] = 0;
        q.push(target);
        while (!q.empty()) {
            const std::size_t w = q.front();
            q.pop();
            for (std::size_t u = 0; u < n_; ++u) {
                if (dist[u] == kUnreachable && edge(u, w)) {
                    dist[u] = dist[w] + 1;
                    q.push(u);
                }
            }
        }
        return dist;
    }

    // Lexicographically smallest shortest path from source; dist must come
    // from distances_to(target) and dist[source] must be finite.
    std::vector<std::size_t> walk(const std::vector<std::size_t>& dist, std::size_t source) const {
        std::vector<std::size_t> path{source};
        std::size_t cur = source;
        while (dist[cur] != 0) {
            for (std::size_t v = 0; v < n_; ++v) {
                if (edge(cur, v) && dist[v] + 1 == dist[cur]) {
                    cur = v;
                    break;
                }
            }
            path.push_back(cur);
        }
        return path;
    }

    bool strongly_connected() const {
        if (n_ <= 1) return true;
        auto reach_all = [&](bool forward) {
            std::vector<char> seen(n_, 0);
            std::vector<std::size_t> stack{0};
            seen[0] = 1;
            std::size_t count = 1;
            while (!stack.empty()) {
                const std::size_t u = stack.back();
                stack.pop_back();
                for (std::size_t v = 0; v < n_; ++v) {
                    const bool linked = forward ? edge(u, v) : edge(v, u);
                    if (linked && !seen[v]) {
                        seen[v] = 1;
                        ++count;
                        stack.push_back(v);
                    }
                }
            }
            return count == n_;
        };
        return reach_all(true) && reach_all(false);
    }

private:
    std::size_t n_;
    std::vector<char> adj_;
};

template <class P>
std::size_t position_of(const std::vector<P>& pts, const P& p) {
    auto it = std::find(pts.begin(), pts.end(), p);
    if (it == pts.end()) {
        throw LookupError("point " + format_real(static_cast<double>(p)) + " is not a sample point of the space");
    }
    return static_cast<std::size_t>(it - pts.begin());
}

}  // namespace detail

// Shortest chain (fewest links) from x to y at level eps, ties broken by the
// smallest successor index. std::nullopt when y is unreachable.
template <GSpaceLike S>
std::optional<Chain<typename S::point_type>> find_chain(const S& space, const typename S::point_type& x,
                                                        const typename S::point_type& y, GValue eps) {
    using P = typename S::point_type;
    if (x == y) {
        throw DomainError("a chain joins two distinct points");
    }
    const std::vector<P> pts = space.sample();
    const std::size_t sx = detail::position_of(pts, x);
    const std::size_t sy = detail::position_of(pts, y);
    const detail::LinkGraph graph(space, pts, eps);
    const auto dist = graph.distances_to(sy);
    if (dist[sx] == detail::kUnreachable) {
        return std::nullopt;
    }
    Chain<P> chain{{}, eps};
    for (std::size_t s : graph.walk(dist, sx)) {
        chain.nodes.push_back(pts[s]);
    }
    return chain;
}

template <GSpaceLike S>
ChainabilityVerdict<typename S::point_type> is_chainable(const S& space, GValue eps,
                                                         bool keep_witnesses = true) {
    using P = typename S::point_type;
    const std::vector<P> pts = space.sample();
    const detail::LinkGraph graph(space, pts, eps);
    const std::size_t n = pts.size();

    std::vector<std::vector<std::size_t>> dist(n);
    for (std::size_t y = 0; y < n; ++y) {
        dist[y] = graph.distances_to(y);
    }

    ChainabilityVerdict<P> verdict;
    verdict.epsilon = eps;
    verdict.chainable = true;
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
            if (x == y) continue;
            const std::size_t d = dist[y][x];
            if (d == detail::kUnreachable) {
                verdict.chainable = false;
                verdict.blocking_pair = std::make_pair(pts[x], pts[y]);
                verdict.witness_chains.clear();
                return verdict;
            }
            verdict.max_degree = std::max(verdict.max_degree, d);
            if (keep_witnesses) {
                Chain<P> chain{{}, eps};
                for (std::size_t s : graph.walk(dist[y], x)) {
                    chain.nodes.push_back(pts[s]);
                }
                verdict.witness_chains.emplace(std::make_pair(pts[x], pts[y]), std::move(chain));
            }
        }
    }
    return verdict;
}

// Minimal eps for which the space is eps-chainable: binary search over the
// distinct link values G(u,v,v), u != v, with a strong-connectivity check.
template <GSpaceLike S>
GValue chainability_threshold(const S& space) {
    const auto pts = space.sample();
    if (pts.size() < 2) {
        throw DomainError("chainability threshold needs at least two points");
    }
    std::vector<GValue> candidates;
    for (std::size_t u = 0; u < pts.size(); ++u) {
        for (std::size_t v = 0; v < pts.size(); ++v) {
            if (u != v) candidates.push_back(space.g(pts[u], pts[v], pts[v]));
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::size_t lo = 0;
    std::size_t hi = candidates.size() - 1;  // the largest value links every pair
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (detail::LinkGraph(space, pts, candidates[mid]).strongly_connected()) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return candidates[lo];
}

}  // namespace gfix
