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
#include <cstdlib>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "champagne/bounds.hpp"
#include "champagne/config.hpp"
#include "champagne/kernel.hpp"
#include "champagne/numeric.hpp"
#include "champagne/random.hpp"
#include "champagne/stats.hpp"

namespace champagne {

//---------------------------------------------------------------------------//
// Processes and targets
//---------------------------------------------------------------------------//

enum class ProcessKind { Brownian, Stable };

struct ProcessSpec {
    ProcessKind kind = ProcessKind::Brownian;
    double alpha = 2.0;
    int d = 3;

    static ProcessSpec brownian(int d) {
        require(d > 2, "brownian: transience needs d >= 3");
        return {ProcessKind::Brownian, 2.0, d};
    }
    static ProcessSpec stable(double alpha, int d) {
        require(alpha > 0.0 && alpha < 2.0, "stable: alpha must lie in (0, 2)");
        require(alpha < d, "stable: transience needs alpha < d");
        require(d <= BallIndex::kMaxDim, "stable: unsupported dimension");
        return {ProcessKind::Stable, alpha, d};
    }
    std::string name() const {
        return kind == ProcessKind::Brownian ? "brownian" : "stable(alpha=" + std::to_string(alpha) + ")";
    }
};

/// Union of the balls of a configuration.
struct BallUnionTarget {
    const BallConfig* config;
    double distance(const double* x) const { return config->index().distance_bound(x); }
    double scale() const { return config->empty() ? 1.0 : config->min_radius(); }
    int dim() const { return config->dim(); }
};

/// Closed shell inner <= |x| <= outer.
struct ShellTarget {
    int d;
    double inner;
    double outer;
    double distance(const double* x) const {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += x[k] * x[k];
        const double n = std::sqrt(s);
        return std::max(inner - n, n - outer);
    }
    double scale() const { return inner; }
    int dim() const { return d; }
};

using Target = std::variant<BallUnionTarget, ShellTarget>;

inline Target union_target(const BallConfig& cfg) { return BallUnionTarget{&cfg}; }
inline Target shell_target(int d, double rho) {
    require(rho > 0.0, "shell_target: rho must be positive");
    return ShellTarget{d, rho, 3.0 * rho};
}

enum class Outcome { Hit, Exit, Timeout };

inline constexpr std::uint64_t kMaxSteps = 10000000;

namespace detail {
inline double norm(const double* x, int d) {
    double s = 0.0;
    for (int k = 0; k < d; ++k) s += x[k] * x[k];
    return std::sqrt(s);
}
}  // namespace detail

//---------------------------------------------------------------------------//
// Trials
//---------------------------------------------------------------------------//

/// Walk on spheres for Brownian motion; x is updated in place.
template <class T>
Outcome wos_trial_brownian(const T& target, double* x, double outer_M, double tol, RandomStream& rng,
                           std::uint64_t max_steps = kMaxSteps) {
    const int d = target.dim();
    double dir[BallIndex::kMaxDim];
    for (std::uint64_t step = 0; step < max_steps; ++step) {
        const double dist = target.distance(x);
        if (dist <= tol) return Outcome::Hit;
        const double to_outer = outer_M - detail::norm(x, d);
        if (to_outer <= tol) return Outcome::Exit;
        const double radius = std::min(dist, to_outer);
        rng.direction(d, dir);
        for (int k = 0; k < d; ++k) x[k] += radius * dir[k];
    }
    return Outcome::Timeout;
}

/// Exit point of the isotropic alpha-stable process started at x from
/// B(0, r); x is overwritten with the exit point. Centred starts are exact
/// (|Y| = r U^-1/2, U ~ Beta(alpha/2, 1 - alpha/2)); off-centre starts use
/// rejection against the centred law.
inline void stable_exit_sample(double* x, double r, double alpha, int d, RandomStream& rng) {
    require(alpha > 0.0 && alpha < 2.0, "stable_exit_sample: alpha must lie in (0, 2)");
    require(r > 0.0, "stable_exit_sample: radius must be positive");
    const double nx = detail::norm(x, d);
    require(nx < r, "stable_exit_sample: start must lie inside the ball");
    double dir[BallIndex::kMaxDim];
    double y[BallIndex::kMaxDim];
    const double a = alpha / 2.0;
    if (nx == 0.0) {
        const double s = r / std::sqrt(rng.beta(a, 1.0 - a));
        rng.direction(d, dir);
        for (int k = 0; k < d; ++k) x[k] = s * dir[k];
        return;
    }
    const double shrink = std::pow((r - nx) / r, d);
    for (int attempt = 0; attempt < 1000000; ++attempt) {
        const double s = r / std::sqrt(rng.beta(a, 1.0 - a));
        rng.direction(d, dir);
        double dxy2 = 0.0;
        for (int k = 0; k < d; ++k) {
            y[k] = s * dir[k];
            dxy2 += (y[k] - x[k]) * (y[k] - x[k]);
        }
        const double accept = std::pow(s * s / dxy2, 0.5 * d) * shrink;
        if (rng.uniform() < accept) {
            for (int k = 0; k < d; ++k) x[k] = y[k];
            return;
        }
    }
    throw NumericError("stable_exit_sample: rejection sampler exhausted 1e6 proposals");
}

/// Ball exit-law walk for the isotropic alpha-stable process. Each step exits
/// the largest target-free ball centred at x; landing in the target is a
/// hit, landing outside B(0, outer_M) an exit.
template <class T>
Outcome stable_trial(const T& target, double* x, double outer_M, double alpha, double tol, RandomStream& rng,
                     std::uint64_t max_steps = kMaxSteps) {
    const int d = target.dim();
    const double a = alpha / 2.0;
    double dir[BallIndex::kMaxDim];
    for (std::uint64_t step = 0; step < max_steps; ++step) {
        const double dist = target.distance(x);
        if (dist <= tol) return Outcome::Hit;
        if (detail::norm(x, d) >= outer_M || !std::isfinite(dist)) return Outcome::Exit;
        const double s = dist / std::sqrt(rng.beta(a, 1.0 - a));
        rng.direction(d, dir);
        for (int k = 0; k < d; ++k) x[k] += s * dir[k];
    }
    return Outcome::Timeout;
}

/// Time-stepping cross-check: X += sqrt(2 S) N with S an (alpha/2)-stable
/// subordinator increment over dt. Hits are detected at landing points only,
/// which biases the estimate downwards.
template <class T>
Outcome increment_trial(const T& target, double* x, double outer_M, double alpha, double dt, RandomStream& rng,
                        std::uint64_t max_steps = kMaxSteps) {
    const int d = target.dim();
    const double time_scale = std::pow(dt, 2.0 / alpha);
    for (std::uint64_t step = 0; step < max_steps; ++step) {
        if (target.distance(x) <= 0.0) return Outcome::Hit;
        if (detail::norm(x, d) >= outer_M) return Outcome::Exit;
        const double sub = alpha < 2.0 ? time_scale * rng.positive_stable(alpha / 2.0) : dt;
        const double sigma = std::sqrt(2.0 * sub);
        for (int k = 0; k < d; ++k) x[k] += sigma * rng.normal();
    }
    return Outcome::Timeout;
}

//---------------------------------------------------------------------------//
// Estimation
//---------------------------------------------------------------------------//

enum class SimMethod { Exact, IncrementStepping };

struct SimOptions {
    std::optional<double> tol;  ///< default 1e-6 * smallest target scale
    unsigned threads = 0;       ///< 0: CHAMPAGNE_THREADS or hardware concurrency
    std::uint64_t max_steps = kMaxSteps;
    SimMethod method = SimMethod::Exact;
    double dt = 1e-3;  ///< increment-stepping time step
};

struct HittingEstimate {
    double p_hat = 0.0;
    std::uint64_t trials = 0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t exits = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t seed = 0;
    double outer_M = 0.0;
    double tolerance = 0.0;
    bool valid = true;
    std::string process;
    std::string method;
    std::vector<double> x0;

    /// Binomial standard error of p_hat.
    double sigma() const { return standard_error(hits, trials); }
};

inline unsigned default_thread_count() {
    if (const char* env = std::getenv("CHAMPAGNE_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {
inline double target_scale(const Target& t) {
    return std::visit([](const auto& x) { return x.scale(); }, t);
}
inline int target_dim(const Target& t) {
    return std::visit([](const auto& x) { return x.dim(); }, t);
}
}  // namespace detail

/// P^x0[T_A < T_{B(0, outer_M)^c}] over `trials` independent walks. Trial i
/// draws from stream (seed, i), so the result does not depend on threading.
inline HittingEstimate estimate_hitting(const ProcessSpec& process, const Target& target, std::span<const double> x0,
                                        double outer_M, std::uint64_t trials, std::uint64_t seed,
                                        const SimOptions& opts = {}) {
    const int d = process.d;
    require(detail::target_dim(target) == d, "estimate_hitting: target dimension does not match the process");
    require(x0.size() == static_cast<std::size_t>(d), "estimate_hitting: x0 has the wrong dimension");
    require(trials >= 100, "estimate_hitting: need at least 100 trials");
    require(outer_M > 0.0 && detail::norm(x0.data(), d) < outer_M, "estimate_hitting: x0 must lie inside B(0, outer_M)");
    const bool start_in_target =
        std::visit([&](const auto& t) { return t.distance(x0.data()) < 0.0; }, target);
    require(!start_in_target, "estimate_hitting: x0 lies in the target");

    HittingEstimate est;
    est.trials = trials;
    est.seed = seed;
    est.outer_M = outer_M;
    est.tolerance = opts.tol.value_or(1e-6 * detail::target_scale(target));
    require(est.tolerance > 0.0, "estimate_hitting: tolerance must be positive");
    est.process = process.name();
    est.method = opts.method == SimMethod::Exact
                     ? (process.kind == ProcessKind::Brownian ? "walk-on-spheres" : "ball-exit-walk")
                     : "increment-stepping";
    est.x0.assign(x0.begin(), x0.end());

    const unsigned threads =
        static_cast<unsigned>(std::min<std::uint64_t>(opts.threads ? opts.threads : default_thread_count(), trials));
    struct Counts {
        std::uint64_t hits = 0, exits = 0, timeouts = 0;
    };
    std::vector<Counts> counts(threads);
    auto work = [&](unsigned w) {
        std::visit(
            [&](const auto& t) {
                double x[BallIndex::kMaxDim];
                const std::uint64_t begin = trials * w / threads;
                const std::uint64_t end = trials * (w + 1) / threads;
                Counts c;
                for (std::uint64_t i = begin; i < end; ++i) {
                    RandomStream rng(seed, i);
                    std::copy(x0.begin(), x0.end(), x);
                    Outcome o;
                    if (opts.method == SimMethod::IncrementStepping)
                        o = increment_trial(t, x, outer_M, process.alpha, opts.dt, rng, opts.max_steps);
                    else if (process.kind == ProcessKind::Brownian)
                        o = wos_trial_brownian(t, x, outer_M, est.tolerance, rng, opts.max_steps);
                    else
                        o = stable_trial(t, x, outer_M, process.alpha, est.tolerance, rng, opts.max_steps);
                    if (o == Outcome::Hit)
                        ++c.hits;
                    else if (o == Outcome::Exit)
                        ++c.exits;
                    else
                        ++c.timeouts;
                }
                counts[w] = c;
            },
            target);
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& th : pool) th.join();
    }
    for (const auto& c : counts) {
        est.hits += c.hits;
        est.exits += c.exits;
        est.timeouts += c.timeouts;
    }
    est.p_hat = static_cast<double>(est.hits) / static_cast<double>(trials);
    const auto ci = wilson_interval(est.hits, trials);
    est.ci_low = std::min(ci.low, est.p_hat);
    est.ci_high = std::max(ci.high, est.p_hat);
    est.valid = est.timeouts * 100 < trials;
    return est;
}

inline HittingEstimate estimate_hitting(const ProcessSpec& process, const BallConfig& cfg, std::span<const double> x0,
                                        double outer_M, std::uint64_t trials, std::uint64_t seed,
                                        const SimOptions& opts = {}) {
    return estimate_hitting(process, union_target(cfg), x0, outer_M, trials, seed, opts);
}

//---------------------------------------------------------------------------//
// Verdict probes
//---------------------------------------------------------------------------//

struct ProbeRow {
    std::vector<double> x0;
    double extent;
    double outer_M;
    HittingEstimate estimate;
};

struct ProbeReport {
    VerdictLabel verdict = VerdictLabel::Inconclusive;
    VerdictRule rule = VerdictRule::None;
    std::vector<ProbeRow> rows;
    /// Trend expected from the verdict: p_hat strictly decreasing with
    /// disjoint confidence intervals (Avoidable) or nondecreasing
    /// (Unavoidable). Empty when there is nothing to compare.
    std::optional<bool> trend_ok;
    std::string trend;
};

namespace detail {
inline void assess_trend(ProbeReport& rep, bool decreasing) {
    if (rep.rows.size() < 2) return;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
        const auto& a = rep.rows[i].estimate;
        const auto& b = rep.rows[i + 1].estimate;
        if (decreasing)
            ok = ok && a.p_hat > b.p_hat && a.ci_low > b.ci_high;
        else
            ok = ok && b.p_hat >= a.p_hat;
    }
    rep.trend = decreasing ? "strictly decreasing, CI-separated" : "nondecreasing";
    rep.trend_ok = ok;
}
}  // namespace detail

/// Hitting estimates from each probe point. Estimates are truncated lower
/// bounds: only the finite family and the horizon B(0, outer_M) are seen.
/// Probe i uses seed + i.
inline ProbeReport verdict_probe(const ProcessSpec& process, const BallConfig& cfg, const Kernel& kernel,
                                 const std::vector<std::vector<double>>& probes, double outer_M, std::uint64_t trials,
                                 std::uint64_t seed, const SimOptions& opts = {}) {
    ProbeReport rep;
    if (probes.empty()) return rep;
    for (std::size_t i = 0; i < probes.size(); ++i)
        for (std::size_t j = i + 1; j < probes.size(); ++j)
            require(probes[i] != probes[j], "verdict_probe: probe points must be distinct");
    const Verdict v = classify(cfg, kernel);
    rep.verdict = v.label();
    rep.rule = v.rule();
    for (std::size_t i = 0; i < probes.size(); ++i) {
        ProbeRow row{probes[i], cfg.extent(), outer_M,
                     estimate_hitting(process, cfg, probes[i], outer_M, trials, seed + i, opts)};
        rep.rows.push_back(std::move(row));
    }
    if (rep.verdict == VerdictLabel::Avoidable) {
        std::vector<ProbeRow> sorted = rep.rows;
        std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
            return detail::norm(a.x0.data(), static_cast<int>(a.x0.size())) <
                   detail::norm(b.x0.data(), static_cast<int>(b.x0.size()));
        });
        ProbeReport tmp;
        tmp.rows = std::move(sorted);
        detail::assess_trend(tmp, true);
        rep.trend = tmp.trend;
        rep.trend_ok = tmp.trend_ok;
    }
    return rep;
}

/// Estimates from a fixed x0 for lattice families of growing extent, with
/// outer_M = outer_factor * extent. Extent i uses seed + i.
inline ProbeReport extent_sweep(const ProcessSpec& process, const Kernel& kernel, double spacing,
                                const RadiusProfile& profile, const std::vector<double>& extents,
                                std::span<const double> x0, double outer_factor, std::uint64_t trials,
                                std::uint64_t seed, const SimOptions& opts = {}) {
    ProbeReport rep;
    std::vector<double> sorted(extents);
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const BallConfig cfg = build_lattice_config(process.d, spacing, profile, sorted[i]);
        if (i + 1 == sorted.size()) {
            const Verdict v = classify(cfg, kernel);
            rep.verdict = v.label();
            rep.rule = v.rule();
        }
        const double outer = outer_factor * sorted[i];
        rep.rows.push_back({std::vector<double>(x0.begin(), x0.end()), sorted[i], outer,
                            estimate_hitting(process, cfg, x0, outer, trials, seed + i, opts)});
    }
    if (rep.verdict == VerdictLabel::Unavoidable) detail::assess_trend(rep, false);
    return rep;
}

}  // namespace champagne
