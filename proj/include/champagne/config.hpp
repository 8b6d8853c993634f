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
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "champagne/kernel.hpp"
#include "champagne/numeric.hpp"
#include "champagne/profile.hpp"
#include "champagne/random.hpp"
#include "champagne/spatial_grid.hpp"

namespace champagne {

//---------------------------------------------------------------------------//
// BallConfig
//---------------------------------------------------------------------------//

/// Finite family of pairwise disjoint open balls B(z, r_z) in R^d.
class BallConfig {
  public:
    BallConfig() = default;

    /// Validates radii, disjointness (|z - z'| >= r_z + r_z'), and agreement
    /// with the profile when one is given.
    static BallConfig from_balls(int d, std::vector<double> centers, std::vector<double> radii,
                                 std::optional<RadiusProfile> profile = std::nullopt,
                                 std::optional<double> lattice_spacing = std::nullopt) {
        require(d >= 1 && d <= BallIndex::kMaxDim, "config: unsupported dimension");
        require(centers.size() == radii.size() * static_cast<std::size_t>(d),
                "config: centre/radius count mismatch");
        for (double r : radii) require(r > 0.0 && std::isfinite(r), "config: radii must be positive");
        for (double x : centers) require(std::isfinite(x), "config: centres must be finite");
        BallConfig cfg(d, std::move(centers), std::move(radii), std::move(profile), lattice_spacing);
        const auto overlaps = cfg.index_->overlapping_pairs();
        if (!overlaps.empty()) {
            throw DomainError("config: balls " + std::to_string(overlaps.front().first) + " and " +
                              std::to_string(overlaps.front().second) + " overlap (" +
                              std::to_string(overlaps.size()) + " overlapping pairs)");
        }
        if (cfg.profile_) {
            for (std::size_t i = 0; i < cfg.size(); ++i) {
                const double want = (*cfg.profile_)(cfg.norm(i));
                require(std::abs(cfg.radius(i) - want) <= 1e-12 * want,
                        "config: radius of ball " + std::to_string(i) + " does not match the profile");
            }
        }
        return cfg;
    }

    int dim() const { return d_; }
    std::size_t size() const { return radii_.size(); }
    bool empty() const { return radii_.empty(); }
    std::span<const double> center(std::size_t i) const { return {&centers_[i * d_], static_cast<std::size_t>(d_)}; }
    const double* center_data(std::size_t i) const { return &centers_[i * d_]; }
    double radius(std::size_t i) const { return radii_[i]; }
    double norm(std::size_t i) const { return norms_[i]; }
    const std::vector<double>& centers() const { return centers_; }
    const std::vector<double>& radii() const { return radii_; }
    const std::optional<RadiusProfile>& profile() const { return profile_; }
    const std::optional<double>& lattice_spacing() const { return spacing_; }
    /// Largest centre norm.
    double extent() const { return extent_; }
    double min_radius() const {
        return radii_.empty() ? 0.0 : *std::min_element(radii_.begin(), radii_.end());
    }
    const std::vector<std::string>& notes() const { return notes_; }
    const BallIndex& index() const { return *index_; }

    /// Profile-backed lattice family: (a)-(c) hold by construction, also after
    /// finitely many deletions.
    bool regularly_located_by_construction() const { return profile_.has_value() && spacing_.has_value(); }

    /// Copy without the k balls of smallest centre norm.
    BallConfig without_innermost(std::size_t k) const {
        std::vector<std::size_t> idx(size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return norms_[a] < norms_[b]; });
        std::vector<char> keep(size(), 1);
        for (std::size_t j = 0; j < std::min(k, size()); ++j) keep[idx[j]] = 0;
        std::vector<double> c, r;
        for (std::size_t i = 0; i < size(); ++i) {
            if (!keep[i]) continue;
            c.insert(c.end(), centers_.begin() + i * d_, centers_.begin() + (i + 1) * d_);
            r.push_back(radii_[i]);
        }
        BallConfig out(d_, std::move(c), std::move(r), profile_, spacing_);
        out.notes_ = notes_;
        return out;
    }

    /// Image under x -> lambda x.
    BallConfig scaled(double lambda) const {
        require(lambda > 0.0, "config: scale must be positive");
        std::vector<double> c(centers_), r(radii_);
        for (double& x : c) x *= lambda;
        for (double& x : r) x *= lambda;
        std::optional<RadiusProfile> p;
        if (profile_) p = profile_->scaled(lambda);
        std::optional<double> s;
        if (spacing_) s = *spacing_ * lambda;
        BallConfig out(d_, std::move(c), std::move(r), p, s);
        out.notes_ = notes_;
        return out;
    }

    void add_note(std::string note) { notes_.push_back(std::move(note)); }

  private:
    friend BallConfig build_lattice_config(int, double, const RadiusProfile&, double);

    BallConfig(int d, std::vector<double> centers, std::vector<double> radii, std::optional<RadiusProfile> profile,
               std::optional<double> spacing)
        : d_(d), centers_(std::move(centers)), radii_(std::move(radii)), profile_(std::move(profile)),
          spacing_(spacing) {
        norms_.resize(radii_.size());
        for (std::size_t i = 0; i < radii_.size(); ++i) {
            double s = 0.0;
            for (int k = 0; k < d_; ++k) s += centers_[i * d_ + k] * centers_[i * d_ + k];
            norms_[i] = std::sqrt(s);
            extent_ = std::max(extent_, norms_[i]);
        }
        index_ = std::make_shared<const BallIndex>(d_, centers_, radii_);
    }

    int d_ = 0;
    std::vector<double> centers_;
    std::vector<double> radii_;
    std::vector<double> norms_;
    std::optional<RadiusProfile> profile_;
    std::optional<double> spacing_;
    double extent_ = 0.0;
    std::vector<std::string> notes_;
    std::shared_ptr<const BallIndex> index_ = std::make_shared<const BallIndex>();
};

/// Balls at the nonzero points of spacing * Z^d within distance `extent` of the
/// origin, with radii phi(|z|). If 2 phi(spacing) > spacing the profile is
/// capped at 0.49 spacing and a note is recorded.
inline BallConfig build_lattice_config(int d, double spacing, const RadiusProfile& profile, double extent) {
    require(d >= 1 && d <= BallIndex::kMaxDim, "lattice: unsupported dimension");
    require(spacing > 0.0 && std::isfinite(spacing), "lattice: spacing must be positive");
    require(extent >= spacing && std::isfinite(extent), "lattice: extent must be at least the spacing");
    RadiusProfile used = profile;
    std::vector<std::string> notes;
    if (2.0 * profile(spacing) > spacing) {
        used = profile.with_cap(0.49 * spacing);
        notes.push_back("radii clipped to 0.49*spacing = " + std::to_string(0.49 * spacing) +
                        " to keep the balls disjoint (profile gives " + std::to_string(profile(spacing)) +
                        " at |z| = spacing)");
    }
    const auto m = static_cast<std::int64_t>(std::floor(extent / spacing + 1e-12));
    const double lim2 = (extent / spacing) * (extent / spacing) * (1.0 + 1e-12);
    std::vector<double> centers, radii;
    std::vector<std::int64_t> k(d, -m);
    for (;;) {
        std::int64_t n2 = 0;
        for (int j = 0; j < d; ++j) n2 += k[j] * k[j];
        if (n2 > 0 && static_cast<double>(n2) <= lim2) {
            for (int j = 0; j < d; ++j) centers.push_back(spacing * static_cast<double>(k[j]));
            radii.push_back(used(spacing * std::sqrt(static_cast<double>(n2))));
        }
        int j = d - 1;
        for (; j >= 0; --j) {
            if (++k[j] <= m) break;
            k[j] = -m;
        }
        if (j < 0) break;
    }
    BallConfig cfg(d, std::move(centers), std::move(radii), used, spacing);
    for (auto& n : notes) cfg.add_note(std::move(n));
    return cfg;
}

//---------------------------------------------------------------------------//
// Tail exponent algebra
//---------------------------------------------------------------------------//

inline constexpr double kExponentTol = 1e-12;

/// r^p ln^lambda r behaviour as r -> infinity.
struct PowerLogRate {
    double p = 0.0;
    double lambda = 0.0;
};

namespace detail {
struct KernelAsymptotics {
    PowerLogRate large;       ///< g(r) as r -> infinity, logs in ln r
    PowerLogRate small;       ///< g(r) as r -> 0, logs in ln(1/r)
};

inline std::optional<KernelAsymptotics> kernel_asymptotics(const Kernel& k) {
    const int d = k.dim();
    if (const auto* f = std::get_if<RieszFamily>(&k.family())) {
        const double e = f->alpha - d;
        return KernelAsymptotics{{e, 0.0}, {e, 0.0}};
    }
    if (const auto* f = std::get_if<GeometricStableFamily>(&k.family()))
        return KernelAsymptotics{{f->delta * f->alpha - d, 0.0}, {-static_cast<double>(d), -(1.0 + f->delta)}};
    return std::nullopt;
}
}  // namespace detail

/// Exponents of the integrand r^(d-1) g(r) / g(phi(r)) at infinity. Available
/// for Riesz and geometric-stable kernels with power or power-log profiles.
struct TailExponents {
    double p = 0.0;
    double lambda = 0.0;

    /// Integral of r^p ln^lambda r over [1, inf) diverges.
    bool integral_divergent() const {
        if (p > -1.0 + kExponentTol) return true;
        if (p < -1.0 - kExponentTol) return false;
        return lambda >= -1.0 - kExponentTol;
    }
    /// rho^d g(rho)/g(phi(rho)) ~ rho^(p+1) ln^lambda rho is unbounded.
    bool growth_unbounded() const {
        const double q = p + 1.0;
        if (q > kExponentTol) return true;
        if (q < -kExponentTol) return false;
        return lambda > kExponentTol;
    }
    /// Divergence is logarithmic: the integrand is exactly r^-1.
    bool logarithmic() const { return std::abs(p + 1.0) <= kExponentTol && std::abs(lambda) <= kExponentTol; }
};

inline std::optional<TailExponents> tail_exponents(const Kernel& kernel, const RadiusProfile& profile) {
    const auto asym = detail::kernel_asymptotics(kernel);
    if (!asym) return std::nullopt;
    const double d = kernel.dim();
    TailExponents t;
    if (!profile.vanishes()) {
        t.p = d - 1.0 + asym->large.p;
        t.lambda = asym->large.lambda;
        return t;
    }
    const double beta = profile.beta();
    const double gamma = profile.gamma();
    // ln(1/phi) ~ beta ln r needs beta > 0; a pure log profile leaves a
    // ln ln factor that the rate model cannot express.
    if (beta <= 0.0 && asym->small.lambda != 0.0) return std::nullopt;
    t.p = d - 1.0 + asym->large.p + beta * asym->small.p;
    t.lambda = asym->large.lambda + gamma * asym->small.p - (beta > 0.0 ? asym->small.lambda : 0.0);
    return t;
}

//---------------------------------------------------------------------------//
// Separation and regular location
//---------------------------------------------------------------------------//

namespace detail {
inline void require_nonzero_centers(const BallConfig& cfg) {
    for (std::size_t i = 0; i < cfg.size(); ++i)
        require(cfg.norm(i) > 0.0, "config: centre " + std::to_string(i) + " is at the origin");
}
inline void require_same_dim(const BallConfig& cfg, const Kernel& kernel) {
    require(cfg.dim() == kernel.dim(), "config dimension " + std::to_string(cfg.dim()) +
                                           " does not match kernel dimension " + std::to_string(kernel.dim()));
}
}  // namespace detail

struct SeparationResult {
    double infimum = std::numeric_limits<double>::infinity();
    std::size_t argmin = 0;
    /// (shell outer radius, minimum term over centres in the dyadic shell)
    std::vector<std::pair<double, double>> shell_minima;
    /// Symbolic answer for profile-backed lattices.
    std::optional<bool> bounded_below;
    std::optional<double> nearest_neighbor_exponent;
    std::string note;
};

/// min over z != z' of (|z - z'|/|z|)^d g(r_z)/g(|z|). For fixed z the
/// minimum is attained at the nearest other centre.
inline SeparationResult separation_infimum(const BallConfig& cfg, const Kernel& kernel) {
    detail::require_same_dim(cfg, kernel);
    detail::require_nonzero_centers(cfg);
    SeparationResult out;
    if (cfg.size() < 2) {
        out.note = "fewer than two balls: infimum over an empty set";
        return out;
    }
    const int d = cfg.dim();
    std::vector<double> mins;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const double nn = cfg.index().nearest_center_distance(i);
        const double term =
            std::exp(d * std::log(nn / cfg.norm(i)) + kernel.log_value(cfg.radius(i)) - kernel.log_value(cfg.norm(i)));
        if (term < out.infimum) {
            out.infimum = term;
            out.argmin = i;
        }
        const auto shell = static_cast<std::size_t>(std::max(0.0, std::ceil(std::log2(cfg.norm(i)))));
        if (mins.size() <= shell) mins.resize(shell + 1, std::numeric_limits<double>::infinity());
        mins[shell] = std::min(mins[shell], term);
    }
    for (std::size_t s = 0; s < mins.size(); ++s)
        if (std::isfinite(mins[s])) out.shell_minima.emplace_back(std::ldexp(1.0, static_cast<int>(s)), mins[s]);
    if (cfg.regularly_located_by_construction()) {
        if (const auto t = tail_exponents(kernel, *cfg.profile())) {
            out.nearest_neighbor_exponent = -(t->p + 1.0);
            out.bounded_below = !t->growth_unbounded();
        }
    }
    return out;
}

struct RegularLocation {
    double eps = 0.0;
    double R = 0.0;
    bool monotone = true;
    std::size_t samples = 0;
};

/// eps = minimal centre distance; R = twice the largest sampled distance to
/// Z (the diameter of the largest empty ball found); monotone = radii
/// nonincreasing in |z|.
inline RegularLocation check_regularly_located(const BallConfig& cfg, std::size_t samples = 10000,
                                               std::uint64_t seed = 0x5eed) {
    RegularLocation out;
    const int d = cfg.dim();
    require(cfg.size() >= 2, "check_regularly_located: need at least two balls");
    out.eps = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cfg.size(); ++i) out.eps = std::min(out.eps, cfg.index().nearest_center_distance(i));

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i < cfg.size(); ++i)
        for (int k = 0; k < d; ++k) centroid[k] += cfg.center_data(i)[k] / static_cast<double>(cfg.size());
    double spread = 0.0;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += std::pow(cfg.center_data(i)[k] - centroid[k], 2);
        spread = std::max(spread, std::sqrt(s));
    }
    // Sample the annulus between a quarter and half of the spread; (b) is a
    // property of the tail, and the centre of the family may hold a hole.
    const double ball_r = 0.5 * spread;
    const double inner_r = 0.25 * spread;
    RandomStream rng(seed, 0);
    std::vector<double> x(d), dir(d);
    std::vector<std::pair<double, std::vector<double>>> top;
    auto inside = [&](const std::vector<double>& p) {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += std::pow(p[k] - centroid[k], 2);
        return s <= ball_r * ball_r && s >= inner_r * inner_r;
    };
    for (std::size_t s = 0; s < samples; ++s) {
        rng.direction(d, dir.data());
        const double rad = std::pow(std::pow(inner_r, d) + rng.uniform() * (std::pow(ball_r, d) - std::pow(inner_r, d)),
                                    1.0 / d);
        for (int k = 0; k < d; ++k) x[k] = centroid[k] + rad * dir[k];
        const double dist = cfg.index().nearest_center_distance(x.data());
        top.emplace_back(dist, x);
        if (top.size() > 64) {
            std::nth_element(top.begin(), top.begin() + 31, top.end(),
                             [](const auto& a, const auto& b) { return a.first > b.first; });
            top.resize(32);
        }
    }
    out.samples = samples;
    double best = 0.0;
    for (auto& [dist, p] : top) {
        double step = 0.25 * std::max(dist, 1e-12);
        std::vector<double> q(d);
        for (int it = 0; it < 200; ++it) {
            rng.direction(d, dir.data());
            for (int k = 0; k < d; ++k) q[k] = p[k] + step * dir[k];
            if (inside(q)) {
                const double dq = cfg.index().nearest_center_distance(q.data());
                if (dq > dist) {
                    dist = dq;
                    p = q;
                    continue;
                }
            }
            step *= 0.97;
        }
        best = std::max(best, dist);
    }
    out.R = 2.0 * best;

    std::vector<std::size_t> idx(cfg.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return cfg.norm(a) < cfg.norm(b); });
    double min_inner = std::numeric_limits<double>::infinity();  // min radius over strictly smaller norms
    std::size_t g = 0;
    while (g < idx.size()) {
        std::size_t h = g;
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        const double n0 = cfg.norm(idx[g]);
        while (h < idx.size() && cfg.norm(idx[h]) <= n0 * (1.0 + 1e-12)) {
            lo = std::min(lo, cfg.radius(idx[h]));
            hi = std::max(hi, cfg.radius(idx[h]));
            ++h;
        }
        if (hi > lo * (1.0 + 1e-12) || hi > min_inner * (1.0 + 1e-12)) out.monotone = false;
        min_inner = std::min(min_inner, lo);
        g = h;
    }
    return out;
}

//---------------------------------------------------------------------------//
// Divergence criteria
//---------------------------------------------------------------------------//

struct CriterionSum {
    double S1 = 0.0;  ///< sum of g(|z|)/g(r_z)
    double S2 = 0.0;  ///< sum of 1/g(r_z)
    std::size_t count = 0;
};

/// Partial sums over centres with |z| <= within (compensated, in storage order).
inline CriterionSum criterion_sum(const BallConfig& cfg, const Kernel& kernel, double within) {
    detail::require_same_dim(cfg, kernel);
    detail::require_nonzero_centers(cfg);
    CompensatedSum s1, s2;
    CriterionSum out;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        if (cfg.norm(i) > within) continue;
        const double lg_r = kernel.log_value(cfg.radius(i));
        s1 += std::exp(kernel.log_value(cfg.norm(i)) - lg_r);
        s2 += std::exp(-lg_r);
        ++out.count;
    }
    out.S1 = s1.value();
    out.S2 = s2.value();
    return out;
}

inline CriterionSum criterion_sum(const BallConfig& cfg, const Kernel& kernel) {
    return criterion_sum(cfg, kernel, std::numeric_limits<double>::infinity());
}

struct CriterionIntegral {
    double value = 0.0;
    std::optional<bool> divergent;
    std::optional<TailExponents> tail;
    bool logarithmic = false;
};

/// Integral of r^(d-1) g(r)/g(phi(r)) over [1, R_max] (in t = ln r) with the
/// symbolic divergence class of the full tail.
inline CriterionIntegral criterion_integral(const Kernel& kernel, const RadiusProfile& profile, int d, double r_max) {
    require(d == kernel.dim(), "criterion_integral: dimension does not match kernel");
    require(r_max >= 1.0, "criterion_integral: R_max must be at least 1");
    CriterionIntegral out;
    if (r_max > 1.0) {
        auto f = [&](double t) {
            const double r = std::exp(t);
            return std::exp(d * t + kernel.log_value(r) - kernel.log_value(profile(r)));
        };
        out.value = integrate_smooth(f, 0.0, std::log(r_max)).value;
    }
    out.tail = tail_exponents(kernel, profile);
    if (out.tail) {
        out.divergent = out.tail->integral_divergent();
        out.logarithmic = out.tail->logarithmic();
    }
    return out;
}

/// rho^d g(rho)/g(phi(rho)).
inline double radius_growth_ratio(const Kernel& kernel, const RadiusProfile& profile, int d, double rho) {
    require(d == kernel.dim(), "radius_growth_ratio: dimension does not match kernel");
    require(rho >= 1.0, "radius_growth_ratio: rho must be at least 1");
    return std::exp(d * std::log(rho) + kernel.log_value(rho) - kernel.log_value(profile(rho)));
}

//---------------------------------------------------------------------------//
// Classifier
//---------------------------------------------------------------------------//

enum class VerdictLabel { Unavoidable, Avoidable, Inconclusive };
enum class VerdictRule { TheoremMain, CorollaryRegular, PropKnownConverse, LimsupInfinite, None };

inline const char* to_string(VerdictLabel l) {
    switch (l) {
        case VerdictLabel::Unavoidable: return "Unavoidable";
        case VerdictLabel::Avoidable: return "Avoidable";
        case VerdictLabel::Inconclusive: return "Inconclusive";
    }
    return "?";
}

inline const char* to_string(VerdictRule r) {
    switch (r) {
        case VerdictRule::TheoremMain: return "TheoremMain";
        case VerdictRule::CorollaryRegular: return "CorollaryRegular";
        case VerdictRule::PropKnownConverse: return "PropKnownConverse";
        case VerdictRule::LimsupInfinite: return "LimsupInfinite";
        case VerdictRule::None: return "None";
    }
    return "?";
}

struct PartialSum {
    double within;
    double S1;
    double S2;
    std::size_t count;
};

struct Evidence {
    std::size_t n_balls = 0;
    double extent = 0.0;
    double S1 = 0.0;
    double S2 = 0.0;
    std::vector<PartialSum> partial_sums;
    double separation_infimum = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, double>> separation_shell_minima;
    std::optional<bool> separation_bounded;
    std::optional<TailExponents> tail;
    std::optional<bool> integral_divergent;
    std::optional<bool> growth_unbounded;
    std::optional<bool> sum_divergent;
    std::optional<double> integral_to_extent;
    std::vector<std::pair<double, double>> growth_samples;
    std::optional<double> fitted_beta;
    bool regularly_located = false;
    bool thresholds_ok = false;
    std::vector<std::string> notes;
};

class Verdict {
  public:
    Verdict(VerdictLabel label, VerdictRule rule, Evidence evidence)
        : label_(label), rule_(rule), evidence_(std::move(evidence)) {
        switch (label_) {
            case VerdictLabel::Unavoidable:
                require(rule_ == VerdictRule::TheoremMain || rule_ == VerdictRule::CorollaryRegular ||
                            rule_ == VerdictRule::LimsupInfinite,
                        "verdict: Unavoidable needs a divergence rule");
                break;
            case VerdictLabel::Avoidable:
                require(rule_ == VerdictRule::PropKnownConverse, "verdict: Avoidable needs PropKnownConverse");
                break;
            case VerdictLabel::Inconclusive:
                require(rule_ == VerdictRule::None, "verdict: Inconclusive carries no rule");
                break;
        }
    }
    VerdictLabel label() const { return label_; }
    VerdictRule rule() const { return rule_; }
    const Evidence& evidence() const { return evidence_; }

  private:
    VerdictLabel label_;
    VerdictRule rule_;
    Evidence evidence_;
};

/// Decision procedure:
///  1. regularly located profile family with symbolic tails: unbounded
///     growth ratio -> LimsupInfinite; divergent integral -> CorollaryRegular;
///     otherwise -> PropKnownConverse;
///  2. bounded separation and divergent sum -> TheoremMain;
///  3. convergent sum -> PropKnownConverse;
///  4. Inconclusive with partial sums and a fitted profile exponent.
inline Verdict classify(const BallConfig& cfg, const Kernel& kernel) {
    detail::require_same_dim(cfg, kernel);
    detail::require_nonzero_centers(cfg);
    Evidence ev;
    ev.n_balls = cfg.size();
    ev.extent = cfg.extent();
    ev.notes = cfg.notes();
    const int d = cfg.dim();

    const auto total = criterion_sum(cfg, kernel);
    ev.S1 = total.S1;
    ev.S2 = total.S2;
    for (int k = 5; k >= 0; --k) {
        const double within = std::ldexp(cfg.extent(), -k);
        if (within < 1.0 && k > 0) continue;
        const auto ps = criterion_sum(cfg, kernel, within);
        ev.partial_sums.push_back({within, ps.S1, ps.S2, ps.count});
    }
    const auto sep = separation_infimum(cfg, kernel);
    ev.separation_infimum = sep.infimum;
    ev.separation_shell_minima = sep.shell_minima;
    ev.separation_bounded = sep.bounded_below;

    // Distinct-norm fit of log r_z against log |z|.
    {
        std::vector<double> xs, ys;
        for (std::size_t i = 0; i < cfg.size(); ++i) {
            xs.push_back(cfg.norm(i));
            ys.push_back(cfg.radius(i));
        }
        const bool spread = !xs.empty() && *std::max_element(xs.begin(), xs.end()) >
                                               *std::min_element(xs.begin(), xs.end()) * (1.0 + 1e-9);
        if (spread) ev.fitted_beta = -log_log_slope(xs, ys);
    }

    const auto& profile = cfg.profile();
    ev.regularly_located = cfg.regularly_located_by_construction();
    if (profile) {
        ev.thresholds_ok = kernel.r0() == 0.0 || profile->infimum() > 0.0;
        if (!ev.thresholds_ok)
            ev.notes.push_back("kernel needs R0 > 0 but the profile tends to 0: radii eventually fall below R0");
        ev.tail = tail_exponents(kernel, *profile);
        if (ev.tail) {
            ev.integral_divergent = ev.tail->integral_divergent();
            ev.growth_unbounded = ev.tail->growth_unbounded();
        } else {
            ev.notes.push_back("no symbolic tail model for this kernel/profile pair");
        }
        for (double rho : log_grid(1.0, std::max(1e6, cfg.extent()), 13)) {
            try {
                ev.growth_samples.emplace_back(rho, radius_growth_ratio(kernel, *profile, d, rho));
            } catch (const DomainError&) {
                break;
            }
        }
        if (cfg.extent() > 1.0) {
            try {
                ev.integral_to_extent = criterion_integral(kernel, *profile, d, cfg.extent()).value;
            } catch (const std::exception& e) {
                ev.notes.push_back(std::string("integral to extent unavailable: ") + e.what());
            }
        }
        // The lattice sum and the integral share their divergence class.
        if (ev.regularly_located && ev.tail) ev.sum_divergent = ev.integral_divergent;
    }

    if (ev.regularly_located && ev.thresholds_ok && ev.tail) {
        if (*ev.growth_unbounded) return {VerdictLabel::Unavoidable, VerdictRule::LimsupInfinite, std::move(ev)};
        if (*ev.integral_divergent)
            return {VerdictLabel::Unavoidable, VerdictRule::CorollaryRegular, std::move(ev)};
        return {VerdictLabel::Avoidable, VerdictRule::PropKnownConverse, std::move(ev)};
    }
    if (ev.separation_bounded.value_or(false) && ev.thresholds_ok && ev.sum_divergent.value_or(false))
        return {VerdictLabel::Unavoidable, VerdictRule::TheoremMain, std::move(ev)};
    if (ev.sum_divergent.has_value() && !*ev.sum_divergent)
        return {VerdictLabel::Avoidable, VerdictRule::PropKnownConverse, std::move(ev)};
    ev.notes.push_back("divergence of the criterion sum cannot be decided from finite data");
    return {VerdictLabel::Inconclusive, VerdictRule::None, std::move(ev)};
}

}  // namespace champagne
