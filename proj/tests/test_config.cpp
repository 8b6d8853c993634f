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

#include <cmath>
#include <random>

#include "champagne/config.hpp"

using namespace champagne;

namespace {

const Kernel kBrownian = Kernel::riesz(2.0, 3);

BallConfig lattice(double beta, double extent, int d = 3, double a = 0.1) {
    return build_lattice_config(d, 1.0, RadiusProfile(PowerLaw{a, beta}), extent);
}

std::size_t brute_lattice_count(int d, int m) {
    std::size_t n = 0;
    if (d == 3) {
        for (int i = -m; i <= m; ++i)
            for (int j = -m; j <= m; ++j)
                for (int k = -m; k <= m; ++k) n += (i * i + j * j + k * k > 0 && i * i + j * j + k * k <= m * m);
    }
    return n;
}

double signed_distance_brute(const BallConfig& cfg, const double* x) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        double s = 0.0;
        for (int k = 0; k < cfg.dim(); ++k) s += std::pow(x[k] - cfg.center_data(i)[k], 2);
        best = std::min(best, std::sqrt(s) - cfg.radius(i));
    }
    return best;
}

}  // namespace

TEST(Lattice, CountsAndRadii) {
    const auto cfg = lattice(2.0, 10.0);
    EXPECT_EQ(cfg.size(), brute_lattice_count(3, 10));
    EXPECT_EQ(cfg.size(), 4168u);
    for (std::size_t i = 0; i < cfg.size(); i += 97) EXPECT_NEAR(cfg.radius(i), 0.1 / (cfg.norm(i) * cfg.norm(i)), 1e-15);
    EXPECT_TRUE(cfg.notes().empty());
    EXPECT_TRUE(cfg.regularly_located_by_construction());
}

TEST(Lattice, OneDimensional) {
    const auto cfg = build_lattice_config(1, 1.0, RadiusProfile(Constant{0.25}), 3.0);
    ASSERT_EQ(cfg.size(), 6u);
    std::vector<double> xs(cfg.centers());
    std::sort(xs.begin(), xs.end());
    EXPECT_EQ(xs, (std::vector<double>{-3, -2, -1, 1, 2, 3}));
    for (double r : cfg.radii()) EXPECT_EQ(r, 0.25);
}

TEST(Lattice, ClipsOverlappingProfile) {
    const auto cfg = build_lattice_config(3, 1.0, RadiusProfile(Constant{0.6}), 2.0);
    for (double r : cfg.radii()) EXPECT_DOUBLE_EQ(r, 0.49);
    ASSERT_EQ(cfg.notes().size(), 1u);
    EXPECT_NE(cfg.notes()[0].find("clipped"), std::string::npos);
}

TEST(Lattice, RejectsBadInput) {
    EXPECT_THROW(build_lattice_config(3, 0.0, RadiusProfile(Constant{0.1}), 2.0), DomainError);
    EXPECT_THROW(build_lattice_config(3, 1.0, RadiusProfile(Constant{0.1}), 0.5), DomainError);
    EXPECT_THROW(RadiusProfile(PowerLaw{-0.1, 2.0}), DomainError);
    EXPECT_THROW(RadiusProfile(PowerLaw{0.1, -1.0}), DomainError);
}

TEST(BallConfig, ValidatesInput) {
    EXPECT_THROW(BallConfig::from_balls(2, {0, 0, 1, 0}, {0.6, 0.6}), DomainError);
    EXPECT_NO_THROW(BallConfig::from_balls(2, {0, 0, 1, 0}, {0.5, 0.5}));
    EXPECT_THROW(BallConfig::from_balls(2, {0, 0}, {-1.0}), DomainError);
    EXPECT_THROW(BallConfig::from_balls(2, {0, 0, 1}, {0.1}), DomainError);
    EXPECT_THROW(BallConfig::from_balls(1, {2.0}, {0.5}, RadiusProfile(Constant{0.4})), DomainError);
}

TEST(SpatialIndex, MatchesBruteForceOnRandomConfigs) {
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 1 + trial % 4;
        const std::size_t n = 2 + gen() % 60;
        const double box = 1.0 + 9.0 * U(gen);
        std::vector<double> c(n * d), r(n);
        for (auto& x : c) x = box * (2.0 * U(gen) - 1.0);
        for (auto& x : r) x = 0.02 + 0.5 * U(gen) * U(gen);
        const BallIndex idx(d, c, r);
        ASSERT_EQ(idx.overlapping_pairs(), overlapping_pairs_bruteforce(d, c, r)) << "trial " << trial;
    }
}

TEST(SpatialIndex, DistanceBoundIsConservative) {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> U(-12.0, 12.0);
    for (int d : {2, 3, 4}) {
        const auto cfg = build_lattice_config(d, 1.0, RadiusProfile(PowerLaw{0.3, 1.0}), d == 4 ? 4.0 : 8.0);
        double x[4];
        for (int q = 0; q < 4000; ++q) {
            for (int k = 0; k < d; ++k) x[k] = U(gen);
            const double exact = signed_distance_brute(cfg, x);
            const double bound = cfg.index().distance_bound(x);
            ASSERT_LE(bound, exact + 1e-12);
            ASSERT_EQ(cfg.index().contains(x), exact < 0.0);
            if (exact < cfg.index().cell_width() - cfg.index().max_radius()) ASSERT_NEAR(bound, exact, 1e-12);
            double nn = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < cfg.size(); ++i) {
                double s = 0.0;
                for (int k = 0; k < d; ++k) s += std::pow(x[k] - cfg.center_data(i)[k], 2);
                nn = std::min(nn, std::sqrt(s));
            }
            ASSERT_NEAR(cfg.index().nearest_center_distance(x), nn, 1e-12);
        }
    }
}

TEST(Separation, BoundedForBetaTwo) {
    const auto cfg = lattice(2.0, 10.0);
    const auto s = separation_infimum(cfg, kBrownian);
    EXPECT_GT(s.infimum, 0.0);
    EXPECT_TRUE(std::isfinite(s.infimum));
    ASSERT_TRUE(s.bounded_below.has_value());
    EXPECT_TRUE(*s.bounded_below);
    EXPECT_NEAR(*s.nearest_neighbor_exponent, 0.0, 1e-12);
    // Brute force over all ordered pairs.
    double brute = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cfg.size(); ++i)
        for (std::size_t j = 0; j < cfg.size(); ++j) {
            if (i == j) continue;
            double s2 = 0.0;
            for (int k = 0; k < 3; ++k) s2 += std::pow(cfg.center_data(i)[k] - cfg.center_data(j)[k], 2);
            const double term = std::pow(std::sqrt(s2) / cfg.norm(i), 3) * kBrownian(cfg.radius(i)) / kBrownian(cfg.norm(i));
            brute = std::min(brute, term);
        }
    EXPECT_NEAR(s.infimum, brute, 1e-12 * brute);
}

TEST(Separation, FailsForBetaOne) {
    const auto s = separation_infimum(lattice(1.0, 10.0), kBrownian);
    ASSERT_TRUE(s.bounded_below.has_value());
    EXPECT_FALSE(*s.bounded_below);
    EXPECT_NEAR(*s.nearest_neighbor_exponent, -1.0, 1e-12);
    // Shell minima decay.
    ASSERT_GE(s.shell_minima.size(), 3u);
    EXPECT_LT(s.shell_minima.back().second, s.shell_minima[1].second);
}

TEST(Separation, SingleBallSentinel) {
    const auto cfg = BallConfig::from_balls(3, {1, 0, 0}, {0.1});
    const auto s = separation_infimum(cfg, kBrownian);
    EXPECT_TRUE(std::isinf(s.infimum));
    EXPECT_FALSE(s.note.empty());
}

TEST(RegularLocation, Lattice) {
    const auto rl = check_regularly_located(lattice(2.0, 8.0));
    EXPECT_DOUBLE_EQ(rl.eps, 1.0);
    EXPECT_NEAR(rl.R, std::sqrt(3.0), 0.05 * std::sqrt(3.0));
    EXPECT_TRUE(rl.monotone);
}

TEST(RegularLocation, NonMonotoneAndPerturbed) {
    const auto bad = BallConfig::from_balls(3, {1, 0, 0, 2, 0, 0}, {0.1, 0.2});
    EXPECT_FALSE(check_regularly_located(bad).monotone);
    std::vector<double> c;
    std::vector<double> r;
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> U(-0.1, 0.1);
    for (int i = 1; i <= 5; ++i)
        for (int j = 1; j <= 5; ++j) {
            c.insert(c.end(), {2.0 * i + U(gen), 2.0 * j + U(gen)});
            r.push_back(0.1);
        }
    c[0] = 2.0;
    c[1] = 2.0;
    c[2] = 2.0;
    c[3] = 2.7;
    const auto cfg = BallConfig::from_balls(2, c, r);
    double brute = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cfg.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.size(); ++j)
            brute = std::min(brute, std::hypot(c[2 * i] - c[2 * j], c[2 * i + 1] - c[2 * j + 1]));
    EXPECT_NEAR(brute, 0.7, 1e-12);
    EXPECT_DOUBLE_EQ(check_regularly_located(cfg).eps, brute);
}

TEST(CriterionSum, Examples) {
    const auto cfg = lattice(2.0, 40.0);
    const double diff = criterion_sum(cfg, kBrownian, 40.0).S1 - criterion_sum(cfg, kBrownian, 20.0).S1;
    EXPECT_NEAR(diff, 0.4 * M_PI * std::log(2.0), 0.1 * 0.4 * M_PI * std::log(2.0));
    const auto single = BallConfig::from_balls(3, {1, 0, 0}, {0.1});
    EXPECT_NEAR(criterion_sum(single, kBrownian).S1, 0.1, 1e-15);
    EXPECT_NEAR(criterion_sum(single, kBrownian).S2, 0.1, 1e-15);
    const auto empty = BallConfig::from_balls(3, {}, {});
    EXPECT_EQ(criterion_sum(empty, kBrownian).S1, 0.0);
    EXPECT_EQ(criterion_sum(empty, kBrownian).S2, 0.0);
}

TEST(CriterionIntegral, Thresholds) {
    for (double beta : {1.0, 1.5, 2.0, 2.5, 3.0}) {
        const auto ci = criterion_integral(kBrownian, RadiusProfile(PowerLaw{0.1, beta}), 3, 100.0);
        ASSERT_TRUE(ci.divergent.has_value());
        EXPECT_EQ(*ci.divergent, beta <= 2.0) << beta;
    }
    // beta = 2: integrand 0.1/r, so the integral is 0.1 ln R.
    const auto ci = criterion_integral(kBrownian, RadiusProfile(PowerLaw{0.1, 2.0}), 3, 1e3);
    EXPECT_TRUE(ci.logarithmic);
    EXPECT_NEAR(ci.value, 0.1 * std::log(1e3), 1e-9);
    const Kernel k12 = Kernel::riesz(1.0, 2);
    for (double beta : {0.5, 1.0, 1.5})
        EXPECT_EQ(*criterion_integral(k12, RadiusProfile(PowerLaw{0.1, beta}), 2, 10.0).divergent, beta <= 1.0);
}

TEST(CriterionIntegral, PowerLogBoundary) {
    // Integrand ~ r^-1 ln^-gamma r at beta = 2: divergent iff gamma <= 1.
    for (double gamma : {0.5, 1.0, 1.5}) {
        const auto ci = criterion_integral(kBrownian, RadiusProfile(PowerLog{0.1, 2.0, gamma}), 3, 10.0);
        ASSERT_TRUE(ci.divergent.has_value());
        EXPECT_EQ(*ci.divergent, gamma <= 1.0) << gamma;
    }
    const Kernel tab = Kernel::tabulated(3, {{1e-3, 1e3}, {1.0, 1.0}, {10.0, 0.1}});
    EXPECT_FALSE(criterion_integral(tab, RadiusProfile(PowerLaw{0.1, 2.0}), 3, 5.0).divergent.has_value());
}

TEST(GrowthRatio, Examples) {
    EXPECT_NEAR(radius_growth_ratio(kBrownian, RadiusProfile(PowerLaw{0.1, 2.0}), 3, 10.0), 0.1, 1e-12);
    EXPECT_NEAR(radius_growth_ratio(kBrownian, RadiusProfile(PowerLaw{0.1, 2.0}), 3, 100.0), 0.1, 1e-12);
    EXPECT_NEAR(radius_growth_ratio(kBrownian, RadiusProfile(PowerLaw{0.1, 1.0}), 3, 10.0), 1.0, 1e-12);
    EXPECT_NEAR(radius_growth_ratio(kBrownian, RadiusProfile(PowerLaw{0.1, 1.0}), 3, 100.0), 10.0, 1e-10);
    EXPECT_NEAR(radius_growth_ratio(kBrownian, RadiusProfile(Constant{0.2}), 3, 10.0), 1000.0 * 0.1 * 0.2, 1e-9);
}

TEST(Classify, BrownianThresholds) {
    const auto v1 = classify(lattice(1.0, 10.0), kBrownian);
    EXPECT_EQ(v1.label(), VerdictLabel::Unavoidable);
    EXPECT_EQ(v1.rule(), VerdictRule::LimsupInfinite);
    const auto v2 = classify(lattice(2.0, 10.0), kBrownian);
    EXPECT_EQ(v2.label(), VerdictLabel::Unavoidable);
    EXPECT_EQ(v2.rule(), VerdictRule::CorollaryRegular);
    const auto v3 = classify(lattice(3.0, 10.0), kBrownian);
    EXPECT_EQ(v3.label(), VerdictLabel::Avoidable);
    EXPECT_EQ(v3.rule(), VerdictRule::PropKnownConverse);
    EXPECT_FALSE(v3.evidence().partial_sums.empty());
}

TEST(Classify, RieszOneTwoThresholds) {
    const Kernel k = Kernel::riesz(1.0, 2);
    EXPECT_EQ(classify(lattice(0.5, 20.0, 2), k).rule(), VerdictRule::LimsupInfinite);
    EXPECT_EQ(classify(lattice(1.0, 20.0, 2), k).rule(), VerdictRule::CorollaryRegular);
    EXPECT_EQ(classify(lattice(2.0, 20.0, 2), k).label(), VerdictLabel::Avoidable);
}

TEST(Classify, InvariantUnderDeletion) {
    for (double beta : {1.0, 2.0, 3.0}) {
        const auto cfg = lattice(beta, 10.0);
        const auto a = classify(cfg, kBrownian);
        const auto b = classify(cfg.without_innermost(10), kBrownian);
        EXPECT_EQ(cfg.without_innermost(10).size(), cfg.size() - 10);
        EXPECT_EQ(a.label(), b.label());
        EXPECT_EQ(a.rule(), b.rule());
    }
}

TEST(Classify, InvariantUnderScaling) {
    for (double beta : {1.0, 2.0, 3.0}) {
        const auto cfg = lattice(beta, 10.0);
        const auto a = classify(cfg, kBrownian);
        const auto b = classify(cfg.scaled(2.0), kBrownian);
        EXPECT_EQ(a.label(), b.label());
        EXPECT_EQ(a.rule(), b.rule());
    }
}

TEST(Classify, RawConfigsAreNotSymbolic) {
    // A raw finite family carries no tail information.
    std::vector<double> c{1, 0, 0, 0, 2, 0, 0, 0, 3};
    const auto cfg = BallConfig::from_balls(3, c, {0.1, 0.1, 0.1});
    const auto v = classify(cfg, kBrownian);
    EXPECT_EQ(v.label(), VerdictLabel::Inconclusive);
    EXPECT_EQ(v.rule(), VerdictRule::None);
    EXPECT_THROW(classify(cfg, Kernel::riesz(1.0, 2)), DomainError);
    EXPECT_THROW(classify(BallConfig::from_balls(3, {0, 0, 0}, {0.1}), kBrownian), DomainError);
}

TEST(Verdict, EnforcesRuleInvariant) {
    EXPECT_THROW(Verdict(VerdictLabel::Avoidable, VerdictRule::TheoremMain, {}), DomainError);
    EXPECT_THROW(Verdict(VerdictLabel::Unavoidable, VerdictRule::PropKnownConverse, {}), DomainError);
    EXPECT_THROW(Verdict(VerdictLabel::Inconclusive, VerdictRule::LimsupInfinite, {}), DomainError);
    EXPECT_NO_THROW(Verdict(VerdictLabel::Unavoidable, VerdictRule::TheoremMain, {}));
}

TEST(Classify, NeverBothTheoremMainAndConverse) {
    // Sweep exponents across the threshold; each verdict carries exactly one rule.
    for (double beta = 0.25; beta <= 4.0; beta += 0.25) {
        const auto v = classify(lattice(beta, 6.0), kBrownian);
        const bool div = v.label() == VerdictLabel::Unavoidable;
        EXPECT_EQ(div, beta <= 2.0) << beta;
        if (v.rule() == VerdictRule::PropKnownConverse) EXPECT_EQ(v.label(), VerdictLabel::Avoidable);
    }
}
