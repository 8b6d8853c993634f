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
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "champagne/config.hpp"
#include "champagne/kernel.hpp"
#include "champagne/numeric.hpp"

namespace champagne {

struct Interval {
    double lower;
    double upper;
    bool contains(double x, double slack = 0.0) const { return x >= lower - slack && x <= upper + slack; }
};

struct CapacityBounds {
    double lower;
    double upper;
    double r;
    double c_used;
};

/// Equilibrium mass of B(0, r): [1/(c g(r)), c/g(r)].
inline CapacityBounds capacity_bounds(const Kernel& kernel, const KernelCertificate& cert, double r) {
    require(r > 0.0, "capacity_bounds: radius must be positive");
    require(r > kernel.r0(), "capacity_bounds: need r > R0");
    const double c = cert.c_used();
    const double g = kernel(r);
    return {1.0 / (c * g), c / g, r, c};
}

/// Hitting probability of B(0, r) from |x| = dist:
/// [g(dist + r)/(c g(r)), min(1, g(dist)/g(r))], upper end 1 for dist <= r.
inline Interval reduced_function_bounds(const Kernel& kernel, const KernelCertificate& cert, double r, double dist) {
    require(r > 0.0, "reduced_function_bounds: radius must be positive");
    require(r > kernel.r0(), "reduced_function_bounds: need r > R0");
    require(dist >= 0.0, "reduced_function_bounds: distance must be nonnegative");
    const double lg_r = kernel.log_value(r);
    const double lower = std::exp(kernel.log_value(dist + r) - lg_r) / cert.c_used();
    const double upper = dist <= r ? 1.0 : std::min(1.0, std::exp(kernel.log_value(dist) - lg_r));
    return {std::min(lower, upper), upper};
}

//---------------------------------------------------------------------------//
// M search
//---------------------------------------------------------------------------//

struct RhoRange {
    double lo;
    double hi;
};

inline RhoRange default_rho_range(const Kernel& kernel) {
    const double t = std::max(kernel.r0(), kernel.r1());
    return {t > 0.0 ? 1.01 * t : 1e-3, 1e6 * std::max(t, 1.0)};
}

inline constexpr std::int64_t kMaxM = 1000000000;

namespace detail {
/// Smallest integer k >= k_min with g(k rho) <= target g(rho) on the grid.
inline std::int64_t smallest_admissible_multiple(const Kernel& kernel, double target, const std::vector<double>& grid,
                                                 std::int64_t k_min, std::int64_t k_max) {
    auto ok = [&](std::int64_t k) {
        try {
            for (double rho : grid)
                if (!(kernel.decay_ratio(static_cast<double>(k), rho) <= target * (1.0 + 1e-12))) return false;
            return true;
        } catch (const ExtrapolationError&) {
            return false;
        }
    };
    std::int64_t lo = k_min - 1;  // known bad (or below the admissible range)
    std::int64_t hi = k_min;
    while (!ok(hi)) {
        lo = hi;
        if (hi >= k_max)
            throw CertificationError("no admissible M below " + std::to_string(k_max) +
                                     ": the kernel decays too slowly on the rho range");
        hi = std::min(2 * hi, k_max);
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

inline std::vector<double> rho_grid(const RhoRange& range, std::optional<double> extra = std::nullopt) {
    require(range.lo > 0.0 && range.hi >= range.lo, "rho range must satisfy 0 < lo <= hi");
    std::vector<double> grid = range.hi > range.lo ? log_grid(range.lo, range.hi, 64) : std::vector<double>{range.lo};
    if (extra) grid.push_back(*extra);
    return grid;
}
}  // namespace detail

struct HameConstants {
    double eta_hame;
    std::int64_t M;
    double c_used;
    std::optional<Rational> eta_exact;
};

/// eta = c^-3/2 and the smallest M > 3 with g((M-2) rho) <= eta g(rho) on
/// the rho grid (and at r).
inline HameConstants hame_constants(const Kernel& kernel, const KernelCertificate& cert, double r, RhoRange range) {
    require(r > kernel.r0() && r > kernel.r1(), "hame_constants: need r > R0 and r > R1");
    const double c = cert.c_used();
    HameConstants out{0.5 / (c * c * c), 0, c, std::nullopt};
    if (cert.exact) {
        if (const auto cr = to_rational(c)) {
            const auto c3 = rational_pow(*cr, 3);
            if (c3) {
                const auto two_c3 = *c3 * Rational{2, 1};
                if (two_c3) out.eta_exact = reciprocal(*two_c3);
            }
        }
    }
    const auto grid = detail::rho_grid(range, r);
    out.M = 2 + detail::smallest_admissible_multiple(kernel, out.eta_hame, grid, 2, kMaxM);
    return out;
}

inline HameConstants hame_constants(const Kernel& kernel, const KernelCertificate& cert, double r) {
    return hame_constants(kernel, cert, r, default_rho_range(kernel));
}

struct ShellConstants {
    double eps;
    double eta_hame;
    double C;
    double delta;
    std::int64_t M;
    double c_used;
    std::optional<Rational> C_exact;
    std::optional<Rational> delta_exact;
    std::optional<Rational> eta_exact;
};

/// C = 1 + (4/eps)^d c^3, delta = 1/(2 C c^4), and the smallest M > 4 with
/// g((M-3) rho) <= delta g(rho) on the rho grid.
inline ShellConstants shell_constants(const Kernel& kernel, const KernelCertificate& cert, double eps, RhoRange range) {
    require(eps > 0.0 && eps <= 0.25, "shell_constants: eps must lie in (0, 1/4]");
    const int d = kernel.dim();
    const double c = cert.c_used();
    ShellConstants out{};
    out.eps = eps;
    out.c_used = c;
    out.eta_hame = 0.5 / (c * c * c);
    out.C = 1.0 + std::pow(4.0 / eps, d) * c * c * c;
    out.delta = 1.0 / (2.0 * out.C * std::pow(c, 4));
    if (cert.exact) {
        const auto cr = to_rational(c);
        const auto er = to_rational(eps);
        if (cr && er) {
            const auto four_over_eps = Rational{4, 1} * *reciprocal(*er);
            const auto c3 = rational_pow(*cr, 3);
            const auto c4 = rational_pow(*cr, 4);
            std::optional<Rational> C;
            if (four_over_eps && c3) {
                if (const auto p = rational_pow(*four_over_eps, d)) {
                    if (const auto t = *p * *c3) C = *t + Rational{1, 1};
                }
            }
            if (C && c4) {
                out.C_exact = C;
                if (const auto t = *C * *c4) {
                    if (const auto t2 = *t * Rational{2, 1}) out.delta_exact = reciprocal(*t2);
                }
            }
            if (c3) {
                if (const auto t = *c3 * Rational{2, 1}) out.eta_exact = reciprocal(*t);
            }
        }
    }
    const auto grid = detail::rho_grid(range);
    out.M = 3 + detail::smallest_admissible_multiple(kernel, out.delta, grid, 2, kMaxM);
    return out;
}

inline ShellConstants shell_constants(const Kernel& kernel, const KernelCertificate& cert, double eps) {
    return shell_constants(kernel, cert, eps, default_rho_range(kernel));
}

struct ShellBound {
    double value = 0.0;   ///< min(1, delta * sum)
    double sum = 0.0;     ///< sum of g(|z|)/g(r_z)
    bool valid = true;    ///< every hypothesis of the shell estimate holds
    std::vector<std::string> violations;
};

/// Lower bound on P^x[T_A < exit B(0, M rho)] for x in B(0, 3 rho) and a
/// family of balls centred in the closed shell rho <= |z| <= 3 rho.
inline ShellBound shell_lower_bound(const ShellConstants& sc, const Kernel& kernel, double rho, const BallConfig& cfg) {
    require(rho > 0.0, "shell_lower_bound: rho must be positive");
    require(cfg.empty() || cfg.dim() == kernel.dim(), "shell_lower_bound: dimension mismatch");
    ShellBound out;
    const int d = kernel.dim();
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const double n = cfg.norm(i);
        if (n < rho * (1.0 - 1e-12) || n > 3.0 * rho * (1.0 + 1e-12))
            throw DomainError("shell_lower_bound: centre " + std::to_string(i) + " lies outside the shell");
    }
    auto flag = [&](std::string what) {
        out.valid = false;
        out.violations.push_back(std::move(what));
    };
    if (!(rho > std::max(kernel.r0(), kernel.r1()))) flag("rho must exceed max(R0, R1)");
    CompensatedSum sum;
    std::vector<double> ratio(cfg.size());
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const double n = cfg.norm(i), r = cfg.radius(i);
        ratio[i] = std::exp(kernel.log_value(n) - kernel.log_value(r));
        sum += ratio[i];
        if (r > n / 4.0 * (1.0 + 1e-12)) flag("ball " + std::to_string(i) + ": r_z > |z|/4");
        if (!(r > kernel.r0())) flag("ball " + std::to_string(i) + ": r_z <= R0");
    }
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const double need = 4.0 * sc.eps * cfg.norm(i) * std::pow(ratio[i], 1.0 / d);
        for (std::size_t j = 0; j < cfg.size(); ++j) {
            if (i == j) continue;
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += std::pow(cfg.center_data(i)[k] - cfg.center_data(j)[k], 2);
            const double dist = std::sqrt(s);
            if (dist < need * (1.0 - 1e-12))
                flag("balls " + std::to_string(i) + "," + std::to_string(j) + ": spacing below 4 eps |z| (g(|z|)/g(r_z))^(1/d)");
            if (j > i && dist < 4.0 * (cfg.radius(i) + cfg.radius(j)))
                flag("balls " + std::to_string(i) + "," + std::to_string(j) + ": enlarged balls B(z, 4 r_z) intersect");
        }
    }
    out.sum = sum.value();
    out.value = std::min(1.0, sc.delta * out.sum);
    return out;
}

}  // namespace champagne
