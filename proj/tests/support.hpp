#pragma once

// Test-side generators and oracles. Nothing here calls into the analysis,
// chains or solver modules.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gfix.hpp"

namespace gfix::testing {

inline std::vector<std::string> index_labels(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return labels;
}

// all-pairs shortest sums over directed links w(u,v) = G(u,v,v)
inline std::vector<std::vector<double>> link_shortest_sums(const FiniteGSpace& space) {
    const std::size_t n = space.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n));
    for (PointIndex u = 0; u < n; ++u) {
        for (PointIndex v = 0; v < n; ++v) d[u][v] = space.g(u, v, v);
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
        }
    }
    return d;
}

// Smallest K >= 1 for which every polygon inequality holds: the largest
// G(x,y,z) / min_w [path(x -> w) + G(w,y,z)].
inline double minimal_polygon_constant(const FiniteGSpace& space) {
    const std::size_t n = space.size();
    const auto sp = link_shortest_sums(space);
    double K = 1.0;
    for (PointIndex x = 0; x < n; ++x) {
        for (PointIndex y = 0; y < n; ++y) {
            for (PointIndex z = 0; z < n; ++z) {
                const double target = space.g(x, y, z);
                if (target == 0.0) continue;
                double best = std::numeric_limits<double>::infinity();
                for (PointIndex w = 0; w < n; ++w) best = std::min(best, sp[x][w] + space.g(w, y, z));
                K = std::max(K, target / best);
            }
        }
    }
    return K;
}

// Minimax path value over directed links, maximized over ordered pairs.
inline double bottleneck_threshold(const FiniteGSpace& space) {
    const std::size_t n = space.size();
    std::vector<std::vector<double>> b(n, std::vector<double>(n));
    for (PointIndex u = 0; u < n; ++u) {
        for (PointIndex v = 0; v < n; ++v) b[u][v] = space.g(u, v, v);
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) b[i][j] = std::min(b[i][j], std::max(b[i][k], b[k][j]));
        }
    }
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j) t = std::max(t, b[i][j]);
        }
    }
    return t;
}

// Valid finite spaces with |X| <= max_points. Pair values come from a small
// lattice so ties are common; the distinct-triple values dominate every pair
// value inside the triple (G3); K is the smallest constant that makes G5 hold.
// metric=true builds a classical G-metric (K = 1) from a random metric.
inline FiniteGSpace random_space(std::mt19937_64& rng, std::size_t max_points = 6, bool metric = false) {
    std::uniform_int_distribution<std::size_t> size_dist(1, max_points);
    std::uniform_int_distribution<int> step(1, 4);
    std::uniform_int_distribution<int> extra(0, 3);
    const std::size_t n = size_dist(rng);
    std::vector<FiniteGSpace::Entry> entries;

    if (metric) {
        std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) d[i][j] = d[j][i] = 0.5 * step(rng);
        }
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
            }
        }
        const bool perimeter = std::bernoulli_distribution(0.5)(rng);
        for (PointIndex a = 0; a < n; ++a) {
            for (PointIndex b = a; b < n; ++b) {
                for (PointIndex c = b; c < n; ++c) {
                    const double v = perimeter ? d[a][b] + d[b][c] + d[a][c]
                                               : std::max({d[a][b], d[b][c], d[a][c]});
                    entries.push_back({a, b, c, v});
                }
            }
        }
        return FiniteGSpace(index_labels(n), 1.0, entries);
    }

    std::vector<std::vector<double>> pair(n, std::vector<double>(n, 0.0));  // pair[a][b] = G(a,a,b)
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (a != b) pair[a][b] = 0.5 * step(rng);
        }
    }
    for (PointIndex a = 0; a < n; ++a) {
        for (PointIndex b = a; b < n; ++b) {
            for (PointIndex c = b; c < n; ++c) {
                double v = 0.0;
                if (a == b && b == c) {
                    v = 0.0;
                } else if (a == b) {
                    v = pair[a][c];
                } else if (b == c) {
                    v = pair[c][a];
                } else {
                    const std::size_t t[3] = {a, b, c};
                    for (std::size_t u : t) {
                        for (std::size_t w : t) {
                            if (u != w) v = std::max(v, pair[u][w]);
                        }
                    }
                    v += 0.5 * extra(rng);
                }
                entries.push_back({a, b, c, v});
            }
        }
    }
    const FiniteGSpace draft(index_labels(n), 1.0, entries);
    return FiniteGSpace(index_labels(n), minimal_polygon_constant(draft), entries);
}

// Mix of shapes: uniform, constant, funnel toward 0, permutation, identity.
inline TabulatedMap random_map(std::mt19937_64& rng, std::size_t n) {
    std::uniform_int_distribution<int> shape(0, 5);
    std::uniform_int_distribution<PointIndex> any(0, n - 1);
    TabulatedMap m{std::vector<PointIndex>(n), "T"};
    switch (shape(rng)) {
        case 0:
        case 1:
            for (auto& v : m.image) v = any(rng);
            break;
        case 2: {
            const PointIndex c = any(rng);
            std::fill(m.image.begin(), m.image.end(), c);
            break;
        }
        case 3:
            for (PointIndex p = 0; p < n; ++p) {
                m.image[p] = p == 0 ? 0 : std::uniform_int_distribution<PointIndex>(0, p - 1)(rng);
            }
            break;
        case 4: {
            for (PointIndex p = 0; p < n; ++p) m.image[p] = p;
            std::shuffle(m.image.begin(), m.image.end(), rng);
            break;
        }
        default:
            for (PointIndex p = 0; p < n; ++p) m.image[p] = p;
            break;
    }
    return m;
}

}  // namespace gfix::testing
