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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "champagne/numeric.hpp"

namespace champagne {

//---------------------------------------------------------------------------//
// Philox4x32-10
//---------------------------------------------------------------------------//

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

namespace detail {
inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(PhiloxCounter& c, const PhiloxKey& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
}
}  // namespace detail

/// The Philox4x32 bijection with 10 rounds.
inline PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += detail::kPhiloxW0;
            key[1] += detail::kPhiloxW1;
        }
        detail::philox_round(ctr, key);
    }
    return ctr;
}

/// One independent stream per (seed, stream id). Satisfies
/// UniformRandomBitGenerator; draws are identical on every platform.
class RandomStream {
  public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream_id) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (pos_ == 2) refill();
        return buf_[pos_++];
    }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal (Box-Muller, both outputs used).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * M_PI * uniform();
        spare_ = radius * std::sin(theta);
        has_spare_ = true;
        return radius * std::cos(theta);
    }

    double exponential() { return -std::log(uniform()); }

    /// Gamma(shape, 1) by Marsaglia-Tsang, boosted for shape < 1.
    double gamma(double shape) {
        require(shape > 0.0, "gamma: shape must be positive");
        if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Beta(a, b) as a gamma ratio.
    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

    /// Positive strictly stable variable with index s in (0, 1) and Laplace
    /// transform exp(-t^s) (Kanter's representation).
    double positive_stable(double s) {
        require(s > 0.0 && s < 1.0, "positive_stable: index must lie in (0,1)");
        const double u = M_PI * uniform();
        const double w = exponential();
        const double a = std::pow(std::sin(s * u), s / (1.0 - s)) * std::sin((1.0 - s) * u) /
                         std::pow(std::sin(u), 1.0 / (1.0 - s));
        return std::pow(a / w, (1.0 - s) / s);
    }

    /// Uniform direction on the unit sphere in R^d, written into out[0..d).
    void direction(int d, double* out) {
        if (d == 1) {
            out[0] = ((*this)() >> 63) ? 1.0 : -1.0;
            return;
        }
        if (d == 2) {
            const double phi = 2.0 * M_PI * uniform();
            out[0] = std::cos(phi);
            out[1] = std::sin(phi);
            return;
        }
        if (d == 3) {
            // Archimedes: the height is uniform on [-1, 1].
            const double z = 2.0 * uniform() - 1.0;
            const double phi = 2.0 * M_PI * uniform();
            const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
            out[0] = s * std::cos(phi);
            out[1] = s * std::sin(phi);
            out[2] = z;
            return;
        }
        double s = 0.0;
        do {
            s = 0.0;
            for (int k = 0; k < d; ++k) {
                out[k] = normal();
                s += out[k] * out[k];
            }
        } while (s == 0.0);
        const double inv = 1.0 / std::sqrt(s);
        for (int k = 0; k < d; ++k) out[k] *= inv;
    }

  private:
    void refill() {
        const PhiloxCounter out = philox4x32_10(
            {static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
             static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
            key_);
        ++block_;
        buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        pos_ = 0;
    }

    PhiloxKey key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buf_{};
    int pos_ = 2;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace champagne
