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


#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>

#include "champagne/bounds.hpp"
#include "champagne/sim.hpp"

using namespace champagne;

namespace {

const ProcessSpec kBM3 = ProcessSpec::brownian(3);

BallConfig unit_ball_at_origin(int d) {
    return BallConfig::from_balls(d, std::vector<double>(d, 0.0), {1.0});
}

// Radial exit-law CDF from the centre of the unit ball, by quadrature of
// (s^2 - 1)^(-alpha/2) / s on (1, rho]. With s = 1 + v^(2/(2-alpha)) the
// integrand is smooth in v.
double exit_radius_cdf(double alpha, double rho) {
    const double q = 2.0 / (2.0 - alpha);
    auto f = [&](double v) {
        const double s = 1.0 + std::pow(v, q);
        return q * std::pow(s + 1.0, -0.5 * alpha) / s;
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    const double total = ts.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    return ts.integrate(f, 0.0, std::pow(rho - 1.0, 1.0 / q)) / total;
}

template <class Cdf>
double ks_distance(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = cdf(xs[i]);
        d = std::max({d, F - i / n, (i + 1) / n - F});
    }
    return d;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace

TEST(Sim, ProcessSpecValidation) {
    EXPECT_THROW(ProcessSpec::brownian(2), DomainError);
    EXPECT_THROW(ProcessSpec::stable(2.0, 3), DomainError);
    EXPECT_THROW(ProcessSpec::stable(1.0, 1), DomainError);
    EXPECT_NO_THROW(ProcessSpec::stable(0.5, 1));
}

TEST(Sim, ConcentricSpheresBrownian) {
    const auto cfg = unit_ball_at_origin(3);
    const std::vector<double> x0{3.0, 0.0, 0.0};
    const auto est = estimate_hitting(kBM3, cfg, x0, 10.0, 100000, 11);
    const double exact = (1.0 / 3.0 - 0.1) / (1.0 - 0.1);
    EXPECT_NEAR(est.p_hat, exact, 3.0 * est.sigma());
    EXPECT_EQ(est.hits + est.exits + est.timeouts, est.trials);
    EXPECT_LE(est.ci_low, est.p_hat);
    EXPECT_GE(est.ci_high, est.p_hat);
    EXPECT_TRUE(est.valid);
}

TEST(Sim, DeterministicAcrossThreads) {
    const auto cfg = build_lattice_config(3, 1.0, RadiusProfile(PowerLaw{0.2, 1.0}), 5.0);
    const std::vector<double> x0{0.5, 0.5, 0.5};
    SimOptions one, many;
    one.threads = 1;
    many.threads = 7;
    const auto a = estimate_hitting(kBM3, cfg, x0, 20.0, 3000, 5, one);
    const auto b = estimate_hitting(kBM3, cfg, x0, 20.0, 3000, 5, many);
    const auto c = estimate_hitting(kBM3, cfg, x0, 20.0, 3000, 5, many);
    EXPECT_EQ(a.hits, b.hits);
    EXPECT_EQ(a.exits, b.exits);
    EXPECT_EQ(b.hits, c.hits);
    EXPECT_EQ(a.p_hat, b.p_hat);
    const auto other = estimate_hitting(kBM3, cfg, x0, 20.0, 3000, 6, many);
    EXPECT_NE(a.hits, other.hits);
}

TEST(Sim, EmptyConfigNeverHits) {
    const auto cfg = BallConfig::from_balls(3, {}, {});
    const std::vector<double> x0{1.0, 0.0, 0.0};
    const auto est = estimate_hitting(kBM3, cfg, x0, 10.0, 100, 1);
    EXPECT_EQ(est.p_hat, 0.0);
    EXPECT_EQ(est.ci_low, 0.0);
    EXPECT_NEAR(est.ci_high, 0.037, 5e-4);
    const auto st = estimate_hitting(ProcessSpec::stable(1.0, 2), BallConfig::from_balls(2, {}, {}),
                                     std::vector<double>{1.0, 0.0}, 10.0, 100, 1);
    EXPECT_EQ(st.hits, 0u);
    EXPECT_EQ(st.exits, 100u);
}

TEST(Sim, RejectsBadArguments) {
    const auto cfg = unit_ball_at_origin(3);
    EXPECT_THROW(estimate_hitting(kBM3, cfg, std::vector<double>{2.0, 0, 0}, 10.0, 99, 1), DomainError);
    EXPECT_THROW(estimate_hitting(kBM3, cfg, std::vector<double>{0.5, 0, 0}, 10.0, 100, 1), DomainError);
    EXPECT_THROW(estimate_hitting(kBM3, cfg, std::vector<double>{20.0, 0, 0}, 10.0, 100, 1), DomainError);
    EXPECT_THROW(estimate_hitting(kBM3, cfg, std::vector<double>{2.0, 0}, 10.0, 100, 1), DomainError);
}

TEST(Sim, TimeoutsInvalidateEstimate) {
    const auto cfg = unit_ball_at_origin(3);
    SimOptions opts;
    opts.max_steps = 1;
    const auto est = estimate_hitting(kBM3, cfg, std::vector<double>{5.0, 0, 0}, 1e4, 200, 3, opts);
    EXPECT_GT(est.timeouts, 2u);
    EXPECT_FALSE(est.valid);
}

TEST(Sim, ToleranceHalvingIsStable) {
    const auto cfg = unit_ball_at_origin(3);
    const std::vector<double> x0{2.0, 0.0, 0.0};
    SimOptions a, b;
    a.tol = 1e-3;
    b.tol = 5e-4;
    const auto ea = estimate_hitting(kBM3, cfg, x0, 100.0, 50000, 21, a);
    const auto eb = estimate_hitting(kBM3, cfg, x0, 100.0, 50000, 21, b);
    const double sigma = std::hypot(ea.sigma(), eb.sigma());
    EXPECT_LT(std::abs(ea.p_hat - eb.p_hat), 2.0 * sigma);
}

TEST(Sim, StableHittingMatchesClosedForm) {
    // Unit ball, alpha = 1, d = 2, |x| = 2: I_{1/4}(1/2, 1/2) = 1/3.
    const auto cfg = unit_ball_at_origin(2);
    const auto est = estimate_hitting(ProcessSpec::stable(1.0, 2), cfg, std::vector<double>{2.0, 0.0}, 1e4, 40000, 8);
    const double exact = boost::math::ibeta(0.5, 0.5, 0.25);
    EXPECT_NEAR(exact, 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(est.p_hat, exact, 3.0 * est.sigma() + 1e-3);
    const Kernel k = Kernel::riesz(1.0, 2);
    EXPECT_TRUE(reduced_function_bounds(k, certify(k), 1.0, 2.0).contains(est.p_hat, 3.0 * est.sigma()));
}

TEST(Sim, SingleTestBallAboveCapacityChain) {
    // Ball B(z, r) with |z| = 2r seen from 0 before leaving B(0, M r), M from the hame search.
    const Kernel k = Kernel::riesz(2.0, 3);
    const auto cert = certify(k);
    const auto h = hame_constants(k, cert, 1.0);
    const auto cfg = BallConfig::from_balls(3, {2.0, 0.0, 0.0}, {1.0});
    const auto est = estimate_hitting(kBM3, cfg, std::vector<double>{0.0, 0.0, 0.0}, static_cast<double>(h.M), 20000, 9);
    const double c3 = std::pow(cert.c_used(), -3.0);
    EXPECT_GE(est.p_hat, c3 - 3.0 * est.sigma());
    // The shell event itself is certain from the centre.
    const auto shell = estimate_hitting(kBM3, shell_target(3, 1.0), std::vector<double>{0.0, 0.0, 0.0},
                                        static_cast<double>(h.M), 1000, 9);
    EXPECT_EQ(shell.hits, 1000u);
}

TEST(Sim, ShellTargetFromOutside) {
    // Outside S(1): hitting |x| <= 3 from |x| = 6 before 100 equals the two-sphere formula.
    const auto est = estimate_hitting(kBM3, shell_target(3, 1.0), std::vector<double>{6.0, 0.0, 0.0}, 100.0, 50000, 4);
    const double exact = (1.0 / 6.0 - 0.01) / (1.0 / 3.0 - 0.01);
    EXPECT_NEAR(est.p_hat, exact, 3.0 * est.sigma());
}

TEST(StableExit, CentredRadialLawMatchesQuadrature) {
    for (double alpha : {0.5, 1.0, 1.5}) {
        for (int d : {2, 3}) {
            RandomStream rng(17, static_cast<std::uint64_t>(10 * alpha + d));
            std::vector<double> radii(20000);
            double x[3];
            for (auto& r : radii) {
                std::fill(x, x + d, 0.0);
                stable_exit_sample(x, 1.0, alpha, d, rng);
                r = detail::norm(x, d);
                ASSERT_GE(r, 1.0);
            }
            EXPECT_LT(ks_distance(radii, [&](double r) { return exit_radius_cdf(alpha, r); }), 0.015)
                << alpha << " " << d;
        }
    }
}

TEST(StableExit, MedianAndNearTwoLimit) {
    RandomStream rng(18, 0);
    std::vector<double> radii(20000);
    double x[3];
    for (auto& r : radii) {
        std::fill(x, x + 3, 0.0);
        stable_exit_sample(x, 2.0, 1.9, 3, rng);
        r = detail::norm(x, 3) / 2.0;
    }
    const double far = exit_radius_cdf(1.9, 1.5);
    const double frac = std::count_if(radii.begin(), radii.end(), [](double r) { return r > 1.5; }) / 20000.0;
    EXPECT_LT(frac, 1.0 - far + 2.0 * std::sqrt(far * (1.0 - far) / 20000.0));
    std::nth_element(radii.begin(), radii.begin() + 10000, radii.end());
    // Median of the oracle CDF by bisection.
    double lo = 1.0, hi = 100.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (exit_radius_cdf(1.9, mid) < 0.5 ? lo : hi) = mid;
    }
    EXPECT_NEAR(radii[10000], lo, 0.02 * lo);
}

TEST(StableExit, OffCentreAgreesWithStrongMarkovWalk) {
    // Exit of B(0,1) from x: direct rejection sampling versus iterating centred
    // exits from the largest ball around the current point inside B(0,1).
    const double alpha = 1.2;
    const int d = 2;
    RandomStream a(19, 0), b(19, 1);
    std::vector<double> direct(20000), walk(20000);
    for (std::size_t i = 0; i < direct.size(); ++i) {
        double x[2] = {0.6, 0.0};
        stable_exit_sample(x, 1.0, alpha, d, a);
        direct[i] = detail::norm(x, d);
        double y[2] = {0.6, 0.0};
        for (;;) {
            const double n = detail::norm(y, d);
            if (n >= 1.0) break;
            const double s = (1.0 - n) / std::sqrt(b.beta(alpha / 2, 1.0 - alpha / 2));
            double dir[2];
            b.direction(d, dir);
            y[0] += s * dir[0];
            y[1] += s * dir[1];
        }
        walk[i] = detail::norm(y, d);
    }
    EXPECT_LT(two_sample_ks(direct, walk), 0.02);
    double bad[2] = {1.0, 0.0};
    EXPECT_THROW(stable_exit_sample(bad, 1.0, alpha, d, a), DomainError);
}

TEST(Sim, IncrementSteppingIsBiasedLow) {
    const auto cfg = unit_ball_at_origin(2);
    const std::vector<double> x0{2.0, 0.0};
    SimOptions opts;
    opts.method = SimMethod::IncrementStepping;
    opts.dt = 1e-2;
    const auto inc = estimate_hitting(ProcessSpec::stable(1.0, 2), cfg, x0, 10.0, 2000, 12, opts);
    const auto ex = estimate_hitting(ProcessSpec::stable(1.0, 2), cfg, x0, 10.0, 2000, 12);
    EXPECT_LE(inc.p_hat, ex.p_hat + 3.0 * std::hypot(inc.sigma(), ex.sigma()));
    EXPECT_GT(inc.p_hat, 0.5 * ex.p_hat);
    EXPECT_EQ(inc.method, "increment-stepping");
}

TEST(Sim, SandwichSmall) {
    RandomStream pick(23, 0);
    for (const auto& [proc, k] : {std::pair{kBM3, Kernel::riesz(2.0, 3)},
                                  std::pair{ProcessSpec::stable(1.0, 2), Kernel::riesz(1.0, 2)}}) {
        const auto cert = certify(k);
        for (int i = 0; i < 4; ++i) {
            const double r = 0.5 + 1.5 * pick.uniform();
            const double dist = r * (1.2 + 4.0 * pick.uniform());
            const auto cfg = BallConfig::from_balls(proc.d, std::vector<double>(proc.d, 0.0), {r});
            std::vector<double> x0(proc.d, 0.0);
            x0[0] = dist;
            const auto est = estimate_hitting(proc, cfg, x0, 1e4, 4000, 100 + i);
            EXPECT_TRUE(reduced_function_bounds(k, cert, r, dist).contains(est.p_hat, 3.0 * est.sigma()))
                << proc.name() << " r=" << r << " dist=" << dist << " p=" << est.p_hat;
        }
    }
}

TEST(Probe, EmptyAndTrend) {
    const auto cfg = build_lattice_config(3, 1.0, RadiusProfile(PowerLaw{0.1, 3.0}), 6.0);
    const Kernel k = Kernel::riesz(2.0, 3);
    const auto empty = verdict_probe(kBM3, cfg, k, {}, 50.0, 100, 1);
    EXPECT_TRUE(empty.rows.empty());
    const auto rep = verdict_probe(kBM3, cfg, k, {{8, 0, 0}, {30, 0, 0}}, 50.0, 4000, 1);
    EXPECT_EQ(rep.verdict, VerdictLabel::Avoidable);
    ASSERT_EQ(rep.rows.size(), 2u);
    ASSERT_TRUE(rep.trend_ok.has_value());
    EXPECT_TRUE(*rep.trend_ok);
    EXPECT_EQ(rep.rows[1].estimate.seed, 2u);
    EXPECT_THROW(verdict_probe(kBM3, cfg, k, {{8, 0, 0}, {8, 0, 0}}, 50.0, 100, 1), DomainError);
}

TEST(Probe, ExtentSweepNondecreasing) {
    const Kernel k = Kernel::riesz(2.0, 3);
    const auto rep = extent_sweep(kBM3, k, 1.0, RadiusProfile(PowerLaw{0.1, 1.0}), {8.0, 4.0},
                                  std::vector<double>{0.0, 0.0, 0.0}, 3.0, 2000, 3);
    EXPECT_EQ(rep.verdict, VerdictLabel::Unavoidable);
    ASSERT_EQ(rep.rows.size(), 2u);
    EXPECT_EQ(rep.rows[0].extent, 4.0);
    EXPECT_EQ(rep.rows[1].outer_M, 24.0);
    ASSERT_TRUE(rep.trend_ok.has_value());
}
