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

/**
 * @file kernel.hpp
 * @brief Radial potential kernels g(|x|) and their decay constants.
 *
 * A kernel is a positive nonincreasing function g on (0, inf) with
 * g(0+) = inf and g(inf) = 0, together with the dimension d of the space it
 * acts on. Three families are provided:
 *
 *  - Riesz:             g(r) = r^(alpha - d), 0 < alpha < d.
 *  - Geometric stable:  a smooth model with g(r) ~ r^-d ln^-(1+delta)(1/r)
 *                       at 0 and g(r) ~ r^(delta*alpha - d) at infinity.
 *  - Tabulated:         monotone cubic interpolation of samples in log-log.
 *
 * The certified constants are
 *
 *   C_G : d int_0^r s^(d-1) g(s) ds <= C_G r^d g(r)      (lower decay)
 *   K,eta: g(K r) <= eta g(r)                             (upper decay)
 *   C_D : g(r/2) <= C_D g(r)                              (doubling)
 *   c   = max(C_D, C_G).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "champagne/numeric.hpp"

namespace champagne {

struct RieszFamily {
    double alpha;
};

/// Model for the geometric-stable potential density:
///   g(r) = kappa^(1+delta) r^-d ln^-(1+delta)(1 + r^-kappa),
///   kappa = delta*alpha/(1+delta).
/// Strictly decreasing whenever delta*alpha < d.
struct GeometricStableFamily {
    double alpha;
    double delta;
};

struct TabulatedFamily {
    std::vector<double> r;
    std::vector<double> g;
};

using KernelFamily = std::variant<RieszFamily, GeometricStableFamily, TabulatedFamily>;

class Kernel {
  public:
    static Kernel riesz(double alpha, int d) {
        require(d >= 1, "riesz: dimension must be positive");
        require(alpha > 0.0 && alpha < d, "riesz: need 0 < alpha < d");
        Kernel k(RieszFamily{alpha}, d, 0.0, 0.0);
        k.check_monotone();
        return k;
    }

    static Kernel geometric_stable(double alpha, double delta, int d, double r0, double r1) {
        require(d >= 1, "geometric_stable: dimension must be positive");
        require(delta > 0.0 && delta <= 1.0, "geometric_stable: need 0 < delta <= 1");
        require(alpha > 0.0 && alpha <= 2.0 && alpha < d,
                "geometric_stable: need 0 < alpha <= 2 and alpha < d");
        require(r0 > 0.0 && r1 > 0.0, "geometric_stable: need R0 > 0 and R1 > 0");
        Kernel k(GeometricStableFamily{alpha, delta}, d, r0, r1);
        k.check_monotone();
        return k;
    }

    /// Samples (r_i, g_i) with r strictly increasing and g positive and
    /// nonincreasing; at least three samples.
    static Kernel tabulated(int d, std::vector<std::pair<double, double>> samples, double r0 = 0.0,
                            double r1 = 0.0) {
        require(d >= 1, "tabulated: dimension must be positive");
        require(samples.size() >= 3, "tabulated: need at least 3 samples");
        require(r0 >= 0.0 && r1 >= 0.0, "tabulated: thresholds must be nonnegative");
        TabulatedFamily fam;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto [r, g] = samples[i];
            require(r > 0.0 && std::isfinite(r), "tabulated: radii must be positive");
            require(g > 0.0 && std::isfinite(g), "tabulated: values must be positive and finite");
            if (i > 0) {
                require(r > samples[i - 1].first, "tabulated: radii must be strictly increasing");
                require(g <= samples[i - 1].second, "tabulated: values must be nonincreasing");
            }
            fam.r.push_back(r);
            fam.g.push_back(g);
        }
        Kernel k(std::move(fam), d, r0, r1);
        k.check_monotone();
        return k;
    }

    int dim() const { return d_; }
    double r0() const { return r0_; }
    double r1() const { return r1_; }
    const KernelFamily& family() const { return family_; }
    bool is_riesz() const { return std::holds_alternative<RieszFamily>(family_); }

    /// Riesz kernels have scale-free ratios, so grid suprema are exact.
    bool has_exact_constants() const { return is_riesz(); }

    std::string name() const {
        return std::visit(
            [this](const auto& f) -> std::string {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, RieszFamily>)
                    return "riesz(alpha=" + fmt(f.alpha) + ", d=" + std::to_string(d_) + ")";
                else if constexpr (std::is_same_v<T, GeometricStableFamily>)
                    return "geometric_stable(alpha=" + fmt(f.alpha) + ", delta=" + fmt(f.delta) +
                           ", d=" + std::to_string(d_) + ")";
                else
                    return "tabulated(" + std::to_string(f.r.size()) +
                           " samples, d=" + std::to_string(d_) + ")";
            },
            family_);
    }

    /// log g(r).
    double log_value(double r) const {
        require(r > 0.0, "kernel: radius must be positive");
        return std::visit(
            [&](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, RieszFamily>) {
                    return (f.alpha - d_) * std::log(r);
                } else if constexpr (std::is_same_v<T, GeometricStableFamily>) {
                    return geostable_log_value(f, std::log(r));
                } else {
                    if (r < f.r.front() || r > f.r.back())
                        throw ExtrapolationError("tabulated kernel queried at r=" + fmt(r) +
                                                 " outside [" + fmt(f.r.front()) + ", " +
                                                 fmt(f.r.back()) + "]");
                    return (*table_)(std::log(r));
                }
            },
            family_);
    }

    double operator()(double r) const { return std::exp(log_value(r)); }

    /// g(k r) / g(r).
    double decay_ratio(double k, double r) const {
        if (const auto* f = std::get_if<RieszFamily>(&family_)) {
            require(r > 0.0 && k > 0.0, "decay_ratio: need k, r > 0");
            return std::pow(k, f->alpha - d_);
        }
        return std::exp(log_value(k * r) - log_value(r));
    }

    /// s^d g(s) as a function of log s. Stays finite as s -> 0 for every
    /// family, which is what the radial integrals need. Tabulated kernels
    /// continue their first log-log segment below the smallest sample.
    double mass_density(double log_s) const {
        return std::visit(
            [&](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, RieszFamily>) {
                    return std::exp(f.alpha * log_s);
                } else if constexpr (std::is_same_v<T, GeometricStableFamily>) {
                    return std::exp((1.0 + f.delta) * (std::log(kappa_of(f)) - std::log(geostable_ell(f, log_s))));
                } else {
                    const double ls0 = std::log(f.r.front());
                    if (log_s < ls0) {
                        const double lg0 = std::log(f.g.front());
                        return std::exp(d_ * log_s + lg0 + head_slope_ * (log_s - ls0));
                    }
                    return std::exp(d_ * log_s + log_value(std::exp(log_s)));
                }
            },
            family_);
    }

    /// int_0^r s^(d-1) g(s) ds / (r^d g(r)), computed with s = r e^-u and
    /// u = e^t - 1 so that log-slow heads still decay exponentially in t.
    double normalized_radial_mass(double r) const {
        require(r > 0.0, "radial mass: radius must be positive");
        if (const auto* t = std::get_if<TabulatedFamily>(&family_)) {
            if (head_slope_ + d_ <= 0.0)
                throw NumericError("tabulated kernel: s^(d-1) g(s) is not integrable at 0 "
                                   "(leading log-log slope " +
                                   fmt(head_slope_) + ")");
            (void)t;
        }
        const double lr = std::log(r);
        const double top = mass_density(lr);
        auto integrand = [&](double t) {
            const double u = std::expm1(t);
            if (!std::isfinite(u)) return 0.0;
            const double m = mass_density(lr - u);
            return m == 0.0 ? 0.0 : m / top * (u + 1.0);
        };
        return integrate_smooth(integrand, 0.0, std::numeric_limits<double>::infinity()).value;
    }

  private:
    Kernel(KernelFamily fam, int d, double r0, double r1)
        : family_(std::move(fam)), d_(d), r0_(r0), r1_(r1) {
        if (auto* t = std::get_if<TabulatedFamily>(&family_)) {
            std::vector<double> lx, ly;
            for (std::size_t i = 0; i < t->r.size(); ++i) {
                lx.push_back(std::log(t->r[i]));
                ly.push_back(std::log(t->g[i]));
            }
            head_slope_ = (ly[1] - ly[0]) / (lx[1] - lx[0]);
            table_ = std::make_shared<const Interpolant>(std::move(lx), std::move(ly));
        }
    }

    static std::string fmt(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }

    static double kappa_of(const GeometricStableFamily& f) { return f.delta * f.alpha / (1.0 + f.delta); }

    /// ln(1 + r^-kappa) without overflow for tiny r.
    static double geostable_ell(const GeometricStableFamily& f, double log_r) {
        const double y = -kappa_of(f) * log_r;
        return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y));
    }

    double geostable_log_value(const GeometricStableFamily& f, double log_r) const {
        return (1.0 + f.delta) * (std::log(kappa_of(f)) - std::log(geostable_ell(f, log_r))) - d_ * log_r;
    }

    void check_monotone() const {
        double lo = 1e-6, hi = 1e6;
        if (const auto* t = std::get_if<TabulatedFamily>(&family_)) {
            lo = t->r.front();
            hi = t->r.back();
        }
        double prev = std::numeric_limits<double>::infinity();
        for (double r : log_grid(lo, hi, 1000)) {
            const double lg = log_value(r);
            if (!std::isfinite(lg) || lg > prev + 1e-12 * std::max(1.0, std::abs(prev)))
                throw DomainError("kernel " + name() + " is not positive and nonincreasing near r=" +
                                  fmt(r));
            prev = lg;
        }
    }

    using Interpolant = MonotoneCubic;

    KernelFamily family_;
    int d_;
    double r0_;
    double r1_;
    double head_slope_ = 0.0;
    std::shared_ptr<const Interpolant> table_;
};

//---------------------------------------------------------------------------//
// Operations
//---------------------------------------------------------------------------//

inline double eval(const Kernel& kernel, double r) { return kernel(r); }

/// d int_0^r s^(d-1) g(s) ds / (r^d g(r)); always >= 1.
inline double ld_ratio(const Kernel& kernel, double r) {
    return kernel.dim() * kernel.normalized_radial_mass(r);
}

struct LdCheck {
    bool holds = false;
    double C_G = 0.0;
    double argmax = 0.0;
    std::vector<double> grid;
    std::vector<double> ratios;
    /// Constant valid down to r_min when the grid starts below R0.
    std::optional<double> extended_C;
    std::vector<std::string> warnings;
};

inline LdCheck verify_ld(const Kernel& kernel, double r_min, double r_max, std::size_t n) {
    require(n >= 2, "verify_ld: need a grid of at least 2 radii");
    require(r_min > 0.0 && r_min < r_max, "verify_ld: need 0 < r_min < r_max");
    LdCheck out;
    out.grid = log_grid(r_min, r_max, n);
    for (double r : out.grid) out.ratios.push_back(ld_ratio(kernel, r));
    const auto it = std::max_element(out.ratios.begin(), out.ratios.end());
    out.C_G = *it;
    out.argmax = out.grid[static_cast<std::size_t>(it - out.ratios.begin())];
    out.holds = std::isfinite(out.C_G);

    // Supremum sitting at the left edge and still climbing: the constant
    // depends on r_min.
    const std::size_t third = std::max<std::size_t>(2, n / 3);
    bool climbing = it == out.ratios.begin();
    for (std::size_t i = 1; i < third && climbing; ++i)
        climbing = out.ratios[i - 1] > out.ratios[i];
    if (climbing && out.ratios.front() > 1.05 * out.ratios.back())
        out.warnings.push_back("C_G is attained at r_min and keeps growing as r_min decreases; "
                               "no finite constant holds down to r = 0");

    if (kernel.r0() > 0.0 && r_min <= kernel.r0()) {
        std::optional<std::size_t> first_above;
        for (std::size_t i = 0; i < n; ++i)
            if (out.grid[i] > kernel.r0()) {
                first_above = i;
                break;
            }
        out.warnings.push_back("grid extends below the certified threshold R0=" +
                               std::to_string(kernel.r0()));
        if (first_above) {
            double c_above = 0.0;
            for (std::size_t i = *first_above; i < n; ++i) c_above = std::max(c_above, out.ratios[i]);
            out.extended_C =
                c_above * std::pow(out.grid[*first_above] / r_min, static_cast<double>(kernel.dim()));
        }
    }
    return out;
}

struct UdCheck {
    bool holds = false;
    double eta = 0.0;
    double K = 0.0;
};

inline UdCheck verify_ud(const Kernel& kernel, double K, double r_min, double r_max, std::size_t n) {
    require(K > 1.0, "verify_ud: need K > 1");
    require(n >= 2, "verify_ud: need a grid of at least 2 radii");
    require(r_min > std::max(kernel.r1(), 0.0) && r_min < r_max, "verify_ud: need R1 < r_min < r_max");
    UdCheck out;
    out.K = K;
    for (double r : log_grid(r_min, r_max, n)) out.eta = std::max(out.eta, kernel.decay_ratio(K, r));
    out.holds = out.eta < 1.0;
    return out;
}

struct KernelCertificate {
    double C_G = 1.0;
    double C_D = 1.0;
    double c = 1.0;
    double K = 2.0;
    double eta_ud = 0.0;
    /// Multiplier applied to c downstream; 1 when the constants are exact.
    double safety = 1.05;
    bool exact = false;
    std::vector<double> grid;
    std::vector<std::string> notes;

    double c_used() const { return c * safety; }
};

inline constexpr double kSafetyFactor = 1.05;

inline KernelCertificate certify(const Kernel& kernel, double r_min, double r_max, std::size_t n) {
    require(n >= 2 && r_min > 0.0 && r_min < r_max, "certify: need n >= 2 and 0 < r_min < r_max");
    const int d = kernel.dim();
    auto above = [](double r_min, double threshold) {
        return threshold > 0.0 ? std::max(r_min, threshold * 1.01) : r_min;
    };

    KernelCertificate cert;
    const double ld_lo = above(r_min, kernel.r0());
    require(ld_lo < r_max, "certify: range lies below R0");
    const LdCheck ld = verify_ld(kernel, ld_lo, r_max, n);
    cert.grid = ld.grid;
    cert.C_G = std::max(1.0, ld.C_G);
    for (const auto& w : ld.warnings) cert.notes.push_back(w);

    const double ud_lo = above(r_min, kernel.r1());
    require(ud_lo < r_max, "certify: range lies below R1");
    bool found = false;
    for (int K = 2; K <= 10 && !found; ++K) {
        const UdCheck ud = verify_ud(kernel, K, ud_lo, r_max, n);
        if (ud.holds) {
            cert.K = K;
            cert.eta_ud = ud.eta;
            found = true;
        }
    }
    if (!found) throw CertificationError("certify: no K in {2,...,10} gives g(Kr) < g(r) on the grid");

    for (double r : ld.grid) cert.C_D = std::max(cert.C_D, kernel.decay_ratio(0.5, r));

    if (const auto* f = std::get_if<RieszFamily>(&kernel.family())) {
        // Closed forms; the quadrature above must agree with them.
        const double cg = d / f->alpha;
        const double cd = std::pow(2.0, d - f->alpha);
        if (std::abs(cert.C_G - cg) > 1e-6 * cg || std::abs(cert.C_D - cd) > 1e-9 * cd)
            throw CertificationError("certify: numeric constants disagree with the power law");
        cert.C_G = cg;
        cert.C_D = cd;
        cert.eta_ud = std::pow(cert.K, f->alpha - d);
        cert.exact = true;
        cert.safety = 1.0;
    } else {
        cert.safety = kSafetyFactor;
        cert.notes.push_back("constants are grid suprema; downstream c includes a safety factor of 1.05");
    }
    if (std::holds_alternative<GeometricStableFamily>(kernel.family()))
        cert.notes.push_back("geometric-stable model: normalisation constants are a modelling choice");

    cert.c = std::max(cert.C_D, cert.C_G);
    if (cert.C_D > std::pow(2.0, d) * cert.C_G * (1.0 + 1e-9))
        throw CertificationError("certify: doubling constant exceeds 2^d C_G");
    return cert;
}

/// Default certification range: above both thresholds, six decades wide.
inline KernelCertificate certify(const Kernel& kernel) {
    const double t = std::max(kernel.r0(), kernel.r1());
    const double lo = t > 0.0 ? t * 1.01 : 1e-3;
    const double hi = 1e3 * std::max(1.0, t);
    return certify(kernel, lo, hi, 64);
}

/// Potential of normalised Lebesgue measure on B(0, r) at a point at
/// distance dist from the centre.
inline double ball_average_potential(const Kernel& kernel, double dist, double r) {
    require(dist >= 0.0, "ball_average_potential: distance must be nonnegative");
    require(r > 0.0 && r > kernel.r0(), "ball_average_potential: need r > R0");
    const int d = kernel.dim();
    if (dist == 0.0) return ld_ratio(kernel, r) * kernel(r);

    // Spheres around x of radius s < r - dist lie inside the ball entirely.
    const double t = dist;
    double inner = 0.0;
    if (t < r) {
        const double a = r - t;
        inner = kernel.normalized_radial_mass(a) * std::pow(a, d) * kernel(a);
    }
    // Fraction of the sphere S(x, s) inside B(0, r).
    auto fraction = [&](double s) {
        const double cth = std::clamp((r * r - t * t - s * s) / (2.0 * t * s), -1.0, 1.0);
        if (d == 1) return cth > -1.0 ? 0.5 : 0.0;
        const double h = 0.5 * (d - 1);
        return boost::math::ibeta(h, h, 0.5 * (1.0 + cth));
    };
    auto integrand = [&](double s) {
        if (s <= 0.0) return 0.0;
        return std::pow(s, d - 1) * kernel(s) * fraction(s);
    };
    const double shell = integrate_endpoint_singular(integrand, std::abs(r - t), r + t).value;
    return d * (inner + shell) / std::pow(r, d);
}

}  // namespace champagne
