#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gfix/error.hpp"
#include "gfix/gspace.hpp"

namespace gfix {

// A coefficient sequence a_1, a_2, ... given either by a closed-form family
// or by a finite table. Closed forms evaluate at any n >= 1; the horizon is
// the number of terms checks and reports look at.
class CoefficientSeq {
public:
    enum class Family { Geometric, InvSqShifted, Harmonic, Constant, Tabulated };

    static constexpr std::size_t kDefaultHorizon = 64;

    // q * rho^n
    static CoefficientSeq geometric(double q, double rho, std::size_t horizon = kDefaultHorizon) {
        require_nonneg(q, "geometric q");
        require_nonneg(rho, "geometric rho");
        return CoefficientSeq(Family::Geometric, q, rho, {}, horizon);
    }

    // (c / (1 + 2^n))^2
    static CoefficientSeq inv_sq_shifted(double c, std::size_t horizon = kDefaultHorizon) {
        require_nonneg(c, "inv-sq-shifted c");
        return CoefficientSeq(Family::InvSqShifted, c, 0.0, {}, horizon);
    }

    // 1 / n
    static CoefficientSeq harmonic(std::size_t horizon = kDefaultHorizon) {
        return CoefficientSeq(Family::Harmonic, 0.0, 0.0, {}, horizon);
    }

    static CoefficientSeq constant(double value, std::size_t horizon = kDefaultHorizon) {
        require_nonneg(value, "constant value");
        return CoefficientSeq(Family::Constant, value, 0.0, {}, horizon);
    }

    static CoefficientSeq tabulated(std::vector<double> values) {
        if (values.empty()) {
            throw DomainError("tabulated sequence is empty");
        }
        for (double v : values) {
            require_nonneg(v, "tabulated term");
        }
        const std::size_t h = values.size();
        return CoefficientSeq(Family::Tabulated, 0.0, 0.0, std::move(values), h);
    }

    Family family() const noexcept { return family_; }
    bool closed_form() const noexcept { return family_ != Family::Tabulated; }
    std::size_t horizon() const noexcept { return horizon_; }
    double first_param() const noexcept { return p1_; }
    double second_param() const noexcept { return p2_; }
    const std::vector<double>& values() const noexcept { return values_; }

    CoefficientSeq with_horizon(std::size_t h) const {
        if (!closed_form()) {
            throw DomainError("the horizon of a tabulated sequence is its length");
        }
        return CoefficientSeq(family_, p1_, p2_, {}, h);
    }

    // Term a_n, n >= 1.
    double operator()(std::size_t n) const {
        if (n == 0) {
            throw DomainError("coefficient sequences are indexed from 1");
        }
        switch (family_) {
            case Family::Geometric: return p1_ * std::pow(p2_, static_cast<double>(n));
            case Family::InvSqShifted: {
                const double r = p1_ / (1.0 + std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(n, 2000))));
                return r * r;
            }
            case Family::Harmonic: return 1.0 / static_cast<double>(n);
            case Family::Constant: return p1_;
            case Family::Tabulated:
                if (n > values_.size()) {
                    throw DomainError("term " + std::to_string(n) + " is beyond the tabulated horizon " +
                                      std::to_string(values_.size()));
                }
                return values_[n - 1];
        }
        return 0.0;
    }

    std::vector<double> terms() const {
        std::vector<double> out(horizon_);
        for (std::size_t n = 1; n <= horizon_; ++n) out[n - 1] = (*this)(n);
        return out;
    }

    std::string describe() const {
        switch (family_) {
            case Family::Geometric: return format_real(p1_) + "*" + format_real(p2_) + "^n";
            case Family::InvSqShifted: return "(" + format_real(p1_) + "/(1+2^n))^2";
            case Family::Harmonic: return "1/n";
            case Family::Constant: return format_real(p1_);
            case Family::Tabulated: return "tabulated[" + std::to_string(values_.size()) + "]";
        }
        return "?";
    }

private:
    CoefficientSeq(Family f, double p1, double p2, std::vector<double> values, std::size_t horizon)
        : family_(f), p1_(p1), p2_(p2), values_(std::move(values)), horizon_(horizon) {
        if (horizon_ == 0) {
            throw DomainError("sequence horizon must be positive");
        }
    }

    static void require_nonneg(double v, const char* what) {
        if (!std::isfinite(v) || v < 0.0) {
            throw DomainError(std::string(what) + " must be finite and >= 0, got " + format_real(v));
        }
    }

    Family family_;
    double p1_;
    double p2_;
    std::vector<double> values_;
    std::size_t horizon_;
};

// F(x) = c * x^s with 0 < s <= 1, c > 0: continuous, non-decreasing,
// subadditive, homogeneous of degree s, F^{-1}(0) = {0}.
class PhiFunction {
public:
    PhiFunction() = default;

    PhiFunction(double s, double c) : s_(s), c_(c) {
        if (!(s > 0.0 && s <= 1.0)) {
            throw DomainError("phi degree s must lie in (0, 1], got " + format_real(s));
        }
        if (!std::isfinite(c) || !(c > 0.0)) {
            throw DomainError("phi scale c must be finite and > 0, got " + format_real(c));
        }
    }

    static PhiFunction identity() { return {}; }
    static PhiFunction sqrt() { return {0.5, 1.0}; }

    double degree() const noexcept { return s_; }
    double scale() const noexcept { return c_; }
    bool is_identity() const noexcept { return s_ == 1.0 && c_ == 1.0; }

    double operator()(double x) const { return s_ == 1.0 ? c_ * x : c_ * std::pow(x, s_); }

    // Maps an F-domain value back to G-units.
    double inverse(double y) const { return s_ == 1.0 ? y / c_ : std::pow(y / c_, 1.0 / s_); }

private:
    double s_ = 1.0;
    double c_ = 1.0;
};

// Three-index coefficient family (i,j,k) -> [0,1), symmetric under index
// permutation, indices from 1.
class CoefficientTensor {
public:
    struct Entry {
        std::size_t i = 1;
        std::size_t j = 1;
        std::size_t k = 1;
        double value = 0.0;
    };

    static CoefficientTensor constant(double value) {
        require_unit(value);
        CoefficientTensor t;
        t.constant_ = value;
        return t;
    }

    static CoefficientTensor tabulated(const std::vector<Entry>& entries) {
        CoefficientTensor t;
        for (const Entry& e : entries) {
            if (e.i == 0 || e.j == 0 || e.k == 0) {
                throw DomainError("tensor indices start at 1");
            }
            require_unit(e.value);
            const Key key = canonical(e.i, e.j, e.k);
            auto [it, inserted] = t.table_.emplace(key, e.value);
            if (!inserted) {
                throw DomainError("tensor entry (" + std::to_string(key[0]) + "," + std::to_string(key[1]) +
                                  "," + std::to_string(key[2]) + ") given twice");
            }
            t.max_index_ = std::max({t.max_index_, e.i, e.j, e.k});
        }
        return t;
    }

    bool is_constant() const noexcept { return constant_.has_value(); }
    std::optional<double> constant_value() const noexcept { return constant_; }

    // Largest index mentioned by a tabulated tensor; nullopt for constants.
    std::optional<std::size_t> horizon() const noexcept {
        if (constant_) return std::nullopt;
        return max_index_;
    }

    double operator()(std::size_t i, std::size_t j, std::size_t k) const {
        if (i == 0 || j == 0 || k == 0) {
            throw DomainError("tensor indices start at 1");
        }
        if (constant_) return *constant_;
        auto it = table_.find(canonical(i, j, k));
        if (it == table_.end()) {
            throw DomainError("tensor entry (" + std::to_string(i) + "," + std::to_string(j) + "," +
                              std::to_string(k) + ") is not tabulated");
        }
        return it->second;
    }

    const std::map<std::array<std::size_t, 3>, double>& entries() const noexcept { return table_; }

private:
    using Key = std::array<std::size_t, 3>;

    static Key canonical(std::size_t i, std::size_t j, std::size_t k) {
        Key key{i, j, k};
        std::sort(key.begin(), key.end());
        return key;
    }

    static void require_unit(double v) {
        if (!std::isfinite(v) || v < 0.0 || v >= 1.0) {
            throw DomainError("tensor values must lie in [0, 1), got " + format_real(v));
        }
    }

    std::optional<double> constant_;
    std::map<Key, double> table_;
    std::size_t max_index_ = 0;
};

}  // namespace gfix
