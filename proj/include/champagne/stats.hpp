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
#include <cstdint>

#include "champagne/numeric.hpp"

namespace champagne {

// two-sided 95% normal quantile
inline constexpr double kZ95 = 1.959963984540054;

struct ProportionInterval {
    double low;
    double high;
};

/// Wilson score interval for k successes in n Bernoulli trials.
inline ProportionInterval wilson_interval(std::uint64_t k, std::uint64_t n, double z = kZ95) {
    require(n > 0 && k <= n, "wilson_interval: need 0 <= k <= n, n > 0");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    ProportionInterval out{std::max(0.0, center - half), std::min(1.0, center + half)};
    if (k == 0) out.low = 0.0;
    if (k == n) out.high = 1.0;
    return out;
}

/// Binomial standard error sqrt(p(1-p)/n) at the point estimate.
inline double standard_error(std::uint64_t k, std::uint64_t n) {
    require(n > 0 && k <= n, "standard_error: need 0 <= k <= n, n > 0");
    const double p = static_cast<double>(k) / static_cast<double>(n);
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace champagne
