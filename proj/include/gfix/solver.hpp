#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gfix/analysis.hpp"
#include "gfix/coefficients.hpp"
#include "gfix/error.hpp"
#include "gfix/gspace.hpp"
#include "gfix/maps.hpp"

namespace gfix {

// points[i+1] = T(points[i]); steps[i] = d_G(x_i, T x_i) for every visited
// point, so the last step is the one that triggered the stopping rule.
template <class P = PointIndex>
struct IterationTrace {
    std::vector<P> points;
    std::vector<GValue> steps;
    GValue residual = 0.0;  // G(x*, Tx*, Tx*) at the last point
    bool converged = false;
    std::size_t iterations = 0;

    const P& last() const { return points.back(); }
};

namespace detail {

inline void require_iteration_params(GValue tol, std::size_t max_iter) {
    if (!(tol > 0.0)) {
        throw DomainError("tol must be > 0, got " + format_real(tol));
    }
    if (max_iter == 0) {
        throw DomainError("max_iter must be >= 1");
    }
}

}  // namespace detail

// Picard iteration x_{n+1} = T x_n until d_G(x_n, x_{n+1}) <= tol or max_iter
// steps have been taken.
template <GSpaceLike S, SelfMapOn<S> M>
IterationTrace<typename S::point_type> picard(const S& space, const M& map, const typename S::point_type& x0,
                                              GValue tol, std::size_t max_iter) {
    detail::require_iteration_params(tol, max_iter);
    require_compatible(space, map);
    require_point(space, x0);

    IterationTrace<typename S::point_type> trace;
    trace.points.push_back(x0);
    auto cur = x0;
    for (;;) {
        const auto next = map(cur);
        const GValue step = derived_metric_unchecked(space, cur, next);
        trace.steps.push_back(step);
        if (step <= tol) {
            trace.residual = space.g(cur, next, next);
            trace.converged = trace.residual <= tol;
            break;
        }
        if (trace.iterations == max_iter) {
            trace.residual = space.g(cur, next, next);
            break;
        }
        trace.points.push_back(next);
        ++trace.iterations;
        cur = next;
    }
    return trace;
}

template <class P = PointIndex>
struct CommonFixedPointResult {
    IterationTrace<P> trace;
    std::optional<P> point;  // set when the orbit stops at a point fixed by every map
};

// Round-robin orbit x_n = T_n(x_{n-1}), T_n = maps[(n-1) mod M]. Stops once
// the current point is fixed (within tol in d_G) by every map of the family.
template <GSpaceLike S, SelfMapOn<S> M>
CommonFixedPointResult<typename S::point_type> common_fixed_point(const S& space, std::span<const M> maps,
                                                                  const typename S::point_type& x0, GValue tol,
                                                                  std::size_t max_iter) {
    detail::require_iteration_params(tol, max_iter);
    if (maps.empty()) {
        throw DomainError("map family is empty");
    }
    for (const M& m : maps) require_compatible(space, m);
    require_point(space, x0);

    CommonFixedPointResult<typename S::point_type> result;
    auto& trace = result.trace;
    trace.points.push_back(x0);
    auto cur = x0;
    for (;;) {
        GValue worst_step = 0.0;
        GValue worst_residual = 0.0;
        for (const M& m : maps) {
            const auto img = m(cur);
            worst_step = std::max(worst_step, derived_metric_unchecked(space, cur, img));
            worst_residual = std::max(worst_residual, space.g(cur, img, img));
        }
        trace.residual = worst_residual;
        if (worst_step <= tol && worst_residual <= tol) {
            trace.steps.push_back(worst_step);
            trace.converged = true;
            result.point = cur;
            break;
        }
        if (trace.iterations == max_iter) {
            trace.steps.push_back(worst_step);
            break;
        }
        const auto next = maps[trace.iterations % maps.size()](cur);
        trace.steps.push_back(derived_metric_unchecked(space, cur, next));
        trace.points.push_back(next);
        ++trace.iterations;
        cur = next;
    }
    return result;
}

// x0, T x0, ..., T^{count-1} x0.
template <GSpaceLike S, SelfMapOn<S> M>
std::vector<typename S::point_type> picard_orbit(const S& space, const M& map, const typename S::point_type& x0,
                                                 std::size_t count) {
    require_point(space, x0);
    std::vector<typename S::point_type> orbit;
    orbit.reserve(count);
    auto cur = x0;
    for (std::size_t i = 0; i < count; ++i) {
        orbit.push_back(cur);
        cur = map(cur);
    }
    return orbit;
}

// ---------------------------------------------------------------------------
// A-priori error bounds

// (a_n + ... + a_{n+m-1}) (1 + 2 a_1 / (1 - 2 a_1)) G0
inline GValue bound_seq_an(const CoefficientSeq& seq, GValue G0, std::size_t n, std::size_t m) {
    const double a1 = seq(1);
    if (!(a1 < 0.5)) {
        throw DomainError("bound needs a_1 < 1/2, got " + format_real(a1));
    }
    if (n == 0) {
        throw DomainError("coefficient index n starts at 1");
    }
    double sum = 0.0;
    for (std::size_t i = n; i < n + m; ++i) sum += seq(i);
    return sum * (1.0 + 2.0 * a1 / (1.0 - 2.0 * a1)) * G0;
}

// (a_n^s + ... + a_{n+m-1}^s) (1 + (2 a_1)^s / (1 - (2 a_1)^s)) FG0, in F-units.
inline double bound_phi_an(const CoefficientSeq& seq, const PhiFunction& phi, double FG0, std::size_t n,
                           std::size_t m) {
    const double s = phi.degree();
    const double t = std::pow(2.0 * seq(1), s);
    if (!(t < 1.0)) {
        throw DomainError("bound needs (2 a_1)^s < 1, got " + format_real(t));
    }
    if (n == 0) {
        throw DomainError("coefficient index n starts at 1");
    }
    double sum = 0.0;
    for (std::size_t i = n; i < n + m; ++i) sum += std::pow(seq(i), s);
    return sum * (1.0 + t / (1.0 - t)) * FG0;
}

// lambda^m / (1 - lambda) * K^2 n eps / 2
inline GValue bound_ulc(double lam, double K, std::size_t n_deg, GValue eps, std::size_t m) {
    if (!(lam >= 0.0 && lam < 1.0)) {
        throw DomainError("bound needs lambda in [0, 1), got " + format_real(lam));
    }
    return std::pow(lam, static_cast<double>(m)) / (1.0 - lam) * K * K * static_cast<double>(n_deg) * eps / 2.0;
}

// K^s lambda^n / (1 - lambda) FG0, in F-units.
inline double bound_lambda_seq(double lam, std::size_t n, double K, double s, double FG0) {
    if (!(lam > 0.0 && lam < 1.0)) {
        throw DomainError("bound needs lambda in (0, 1), got " + format_real(lam));
    }
    return std::pow(K, s) * std::pow(lam, static_cast<double>(n)) / (1.0 - lam) * FG0;
}

}  // namespace gfix
