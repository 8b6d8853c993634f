/*
   Copyright 2026 The champagne authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <variant>

#include "champagne/numeric.hpp"

namespace champagne {

/// phi(r) = a r^-beta
struct PowerLaw {
    double a;
    double beta;
};

/// phi(r) = a r^-beta ln^-gamma(e + r)
struct PowerLog {
    double a;
    double beta;
    double gamma;
};

/// phi(r) = a
struct Constant {
    double a;
};

/// Decreasing radius profile r_z = phi(|z|), optionally clipped from above
/// at `cap` (the lattice generator clips to keep balls disjoint).
class RadiusProfile {
  public:
    using Shape = std::variant<PowerLaw, PowerLog, Constant>;

    RadiusProfile(Shape shape, double cap = std::numeric_limits<double>::infinity())
        : shape_(shape), cap_(cap) {
        std::visit(
            [](const auto& s) {
                require(s.a > 0.0 && std::isfinite(s.a), "profile: amplitude must be positive");
                using T = std::decay_t<decltype(s)>;
                if constexpr (!std::is_same_v<T, Constant>)
                    require(s.beta >= 0.0, "profile: beta must be nonnegative (decreasing profile)");
                if constexpr (std::is_same_v<T, PowerLog>)
                    require(s.gamma >= 0.0, "profile: gamma must be nonnegative (decreasing profile)");
            },
            shape_);
        require(cap > 0.0, "profile: cap must be positive");
    }

    const Shape& shape() const { return shape_; }
    double cap() const { return cap_; }
    bool clipped() const { return std::isfinite(cap_); }
    RadiusProfile with_cap(double cap) const { return RadiusProfile(shape_, std::min(cap, cap_)); }

    /// Unclipped phi(r).
    double raw(double r) const {
        return std::visit(
            [r](const auto& s) -> double {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PowerLaw>)
                    return s.a * std::pow(r, -s.beta);
                else if constexpr (std::is_same_v<T, PowerLog>)
                    return s.a * std::pow(r, -s.beta) * std::pow(std::log(M_E + r), -s.gamma);
                else
                    return s.a;
            },
            shape_);
    }

    double operator()(double r) const { return std::min(raw(r), cap_); }

    /// Power-law exponent beta (0 for constants) and log exponent gamma.
    double beta() const {
        return std::visit(
            [](const auto& s) -> double {
                if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Constant>)
                    return 0.0;
                else
                    return s.beta;
            },
            shape_);
    }
    double gamma() const {
        if (const auto* p = std::get_if<PowerLog>(&shape_)) return p->gamma;
        return 0.0;
    }

    /// phi decays to zero at infinity.
    bool vanishes() const { return beta() > 0.0 || gamma() > 0.0; }

    /// inf of phi over [0, inf).
    double infimum() const {
        if (vanishes()) return 0.0;
        return (*this)(0.0);
    }

    /// Same profile after scaling space by lambda: phi'(r) = lambda phi(r / lambda).
    RadiusProfile scaled(double lambda) const {
        require(lambda > 0.0, "profile: scale must be positive");
        const double cap = cap_ * lambda;
        return std::visit(
            [&](const auto& s) -> RadiusProfile {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PowerLaw>)
                    return {PowerLaw{s.a * std::pow(lambda, 1.0 + s.beta), s.beta}, cap};
                else if constexpr (std::is_same_v<T, Constant>)
                    return {Constant{s.a * lambda}, cap};
                else
                    throw DomainError("profile: PowerLog profiles are not closed under scaling");
            },
            shape_);
    }

    std::string name() const {
        char buf[128];
        std::visit(
            [&](const auto& s) {
                using T = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<T, PowerLaw>)
                    std::snprintf(buf, sizeof buf, "power(a=%g, beta=%g)", s.a, s.beta);
                else if constexpr (std::is_same_v<T, PowerLog>)
                    std::snprintf(buf, sizeof buf, "powerlog(a=%g, beta=%g, gamma=%g)", s.a, s.beta, s.gamma);
                else
                    std::snprintf(buf, sizeof buf, "constant(a=%g)", s.a);
            },
            shape_);
        std::string out = buf;
        if (clipped()) out += " clipped at " + std::to_string(cap_);
        return out;
    }

  private:
    Shape shape_;
    double cap_;
};

}  // namespace champagne
