#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <string>
#include <vector>

#include "gfix/error.hpp"
#include "gfix/gspace.hpp"

namespace gfix {

// Self-map of a finite space given by its image table.
struct TabulatedMap {
    std::vector<PointIndex> image;
    std::string label = "T";

    PointIndex operator()(PointIndex p) const noexcept { return image[p]; }
};

// x -> slope * x + offset on an analytic interval.
struct AffineMap {
    double slope = 1.0;
    double offset = 0.0;
    std::string label = "T";

    double operator()(double x) const noexcept { return slope * x + offset; }
};

template <class M, class S>
concept SelfMapOn = GSpaceLike<S> && requires(const M& m, const typename S::point_type& p) {
    { m(p) } -> std::convertible_to<typename S::point_type>;
};

inline void require_compatible(const FiniteGSpace& space, const TabulatedMap& map) {
    if (map.image.size() != space.size()) {
        throw DomainError("map '" + map.label + "' has " + std::to_string(map.image.size()) +
                          " images but the space has " + std::to_string(space.size()) + " points");
    }
    for (std::size_t p = 0; p < map.image.size(); ++p) {
        if (map.image[p] >= space.size()) {
            throw DomainError("map '" + map.label + "' sends point " + std::to_string(p) +
                              " outside the space");
        }
    }
}

inline void require_compatible(const AnalyticGSpace& space, const AffineMap& map) {
    if (!std::isfinite(map.slope) || !std::isfinite(map.offset)) {
        throw DomainError("map '" + map.label + "' has non-finite coefficients");
    }
    // An affine map sends the interval into itself iff both endpoints land inside.
    if (!space.contains(map(space.lo())) || !space.contains(map(space.hi()))) {
        throw DomainError("map '" + map.label + "' does not send [" + format_real(space.lo()) + ", " +
                          format_real(space.hi()) + "] into itself");
    }
}

// n-fold composition; power(m, 0) is the identity.
inline TabulatedMap power(const TabulatedMap& map, std::size_t n) {
    TabulatedMap out{std::vector<PointIndex>(map.image.size()), map.label + "^" + std::to_string(n)};
    for (PointIndex p = 0; p < map.image.size(); ++p) {
        PointIndex q = p;
        for (std::size_t i = 0; i < n; ++i) {
            q = map.image[q];
        }
        out.image[p] = q;
    }
    return out;
}

inline AffineMap power(const AffineMap& map, std::size_t n) {
    double slope = 1.0;
    double offset = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        offset = map.slope * offset + map.offset;
        slope *= map.slope;
    }
    return {slope, offset, map.label + "^" + std::to_string(n)};
}

inline TabulatedMap identity_map(std::size_t n) {
    TabulatedMap m{std::vector<PointIndex>(n), "id"};
    for (PointIndex p = 0; p < n; ++p) m.image[p] = p;
    return m;
}

inline TabulatedMap constant_map(std::size_t n, PointIndex value) {
    return {std::vector<PointIndex>(n, value), "const_" + std::to_string(value)};
}

namespace examples {

// T0 = T1 = 0 on the two-point space.
inline TabulatedMap two_point_map() { return {{0, 0}, "T"}; }

// T0 = T1 = 0, T2 = 1 on the three-point space.
inline TabulatedMap three_point_map() { return {{0, 0, 1}, "T"}; }

// T(x) = x / 16 on [0,1].
inline AffineMap sixteenth_map() { return {1.0 / 16.0, 0.0, "x/16"}; }

}  // namespace examples

}  // namespace gfix
