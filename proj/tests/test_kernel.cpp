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

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "champagne/kernel.hpp"

using namespace champagne;

namespace {

// Independent oracle for the geometric-stable model, written in t = ln s:
// e^{dt} g(e^t) = kappa^(1+delta) ln^-(1+delta)(1 + e^{-kappa t}).
double geostable_ld_oracle(double alpha, double delta, int d, double r) {
    const double kappa = delta * alpha / (1.0 + delta);
    auto mass = [&](double t) {
        const double y = -kappa * t;
        const double ell = y > 30.0 ? y + std::exp(-y) : std::log1p(std::exp(y));
        return std::pow(kappa / ell, 1.0 + delta);
    };
    const double lr = std::log(r);
    double err = 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    boost::math::quadrature::exp_sinh<double> es;
    const double head = es.integrate([&](double s) { return mass(-s); }, 50.0 - lr, std::numeric_limits<double>::infinity());
    const double body = GK::integrate(mass, lr - 50.0, lr, 30, 1e-13, &err);
    return d * (head + body) / mass(lr);
}

}  // namespace

TEST(Kernel, RieszValuesAndRatios) {
    const Kernel k = Kernel::riesz(2.0, 3);
    EXPECT_DOUBLE_EQ(k(2.0), 0.5);
    EXPECT_DOUBLE_EQ(k.decay_ratio(2.0, 7.0), 0.5);
    EXPECT_NEAR(ld_ratio(k, 0.3), 1.5, 1e-9);
    EXPECT_NEAR(ld_ratio(k, 300.0), 1.5, 1e-9);
}

TEST(Kernel, RieszCertificateIsExact) {
    const auto cert = certify(Kernel::riesz(2.0, 3));
    EXPECT_TRUE(cert.exact);
    EXPECT_EQ(cert.C_G, 1.5);
    EXPECT_EQ(cert.C_D, 2.0);
    EXPECT_EQ(cert.c, 2.0);
    EXPECT_EQ(cert.safety, 1.0);
    EXPECT_EQ(cert.c_used(), 2.0);
    EXPECT_EQ(cert.K, 2.0);
    EXPECT_EQ(cert.eta_ud, 0.5);
}

TEST(Kernel, RieszConstantsAcrossParameters) {
    for (auto [alpha, d] : {std::pair{1.0, 2}, {1.0, 3}, {1.5, 4}, {0.5, 1}}) {
        const auto cert = certify(Kernel::riesz(alpha, d));
        EXPECT_DOUBLE_EQ(cert.C_G, d / alpha);
        EXPECT_DOUBLE_EQ(cert.C_D, std::pow(2.0, d - alpha));
        EXPECT_DOUBLE_EQ(cert.c, std::max(d / alpha, std::pow(2.0, d - alpha)));
    }
}

TEST(Kernel, RejectsInvalidParameters) {
    EXPECT_THROW(Kernel::riesz(3.0, 3), DomainError);
    EXPECT_THROW(Kernel::riesz(0.0, 3), DomainError);
    EXPECT_THROW(Kernel::riesz(1.0, 0), DomainError);
    EXPECT_THROW(Kernel::geometric_stable(1.0, 0.5, 3, 0.0, 1.0), DomainError);
    EXPECT_THROW(Kernel::geometric_stable(1.0, 1.5, 3, 1.0, 1.0), DomainError);
    EXPECT_THROW(Kernel::tabulated(3, {{1.0, 1.0}, {2.0, 2.0}, {3.0, 0.5}}), DomainError);
    EXPECT_THROW(Kernel::tabulated(3, {{1.0, 1.0}, {2.0, 0.5}}), DomainError);
}

TEST(Kernel, GeometricStableMatchesOracle) {
    const Kernel k = Kernel::geometric_stable(1.0, 0.5, 3, 1.0, 1.0);
    for (double r : {0.01, 0.5, 2.0, 50.0, 1e4})
        EXPECT_NEAR(ld_ratio(k, r), geostable_ld_oracle(1.0, 0.5, 3, r), 1e-7 * ld_ratio(k, r));
    const Kernel k2 = Kernel::geometric_stable(2.0, 1.0, 3, 0.05, 1.0);
    for (double r : {0.1, 1.0, 10.0})
        EXPECT_NEAR(ld_ratio(k2, r), geostable_ld_oracle(2.0, 1.0, 3, r), 1e-7 * ld_ratio(k2, r));
}

TEST(Kernel, GeometricStableLdFailsAtZero) {
    // Near 0 the radial mass behaves like ln^-1(1/r), so the ratio grows like d ln(1/r).
    const Kernel k = Kernel::geometric_stable(2.0, 1.0, 3, 0.05, 1.0);
    double prev = 0.0;
    for (double L : {5.0, 10.0, 20.0, 40.0}) {
        const double v = ld_ratio(k, std::exp(-L));
        EXPECT_GT(v, prev);
        prev = v;
    }
    EXPECT_NEAR(ld_ratio(k, std::exp(-40.0)) / (3 * 40.0), 1.0, 0.01);
}

TEST(Kernel, TabulatedReproducesRiesz) {
    std::vector<std::pair<double, double>> s;
    for (double r : log_grid(1e-3, 1e4, 200)) s.emplace_back(r, 1.0 / r);
    const Kernel k = Kernel::tabulated(3, s);
    EXPECT_NEAR(k(2.5), 0.4, 1e-9);
    const auto cert = certify(k, 1e-2, 1e3, 64);
    EXPECT_FALSE(cert.exact);
    EXPECT_NEAR(cert.C_G, 1.5, 1e-4);
    EXPECT_NEAR(cert.C_D, 2.0, 1e-6);
    EXPECT_NEAR(cert.c_used(), 2.0 * 1.05, 1e-4);
}

TEST(Kernel, VerifyUdMatchesPowerLaw) {
    const Kernel k = Kernel::riesz(1.0, 3);
    const auto ud = verify_ud(k, 3.0, 0.1, 100.0, 20);
    EXPECT_TRUE(ud.holds);
    EXPECT_NEAR(ud.eta, 1.0 / 9.0, 1e-12);
    EXPECT_THROW(verify_ud(k, 1.0, 0.1, 100.0, 20), DomainError);
}

TEST(Kernel, VerifyLdReportsArgmax) {
    const Kernel k = Kernel::geometric_stable(1.0, 0.5, 3, 1.0, 1.0);
    const auto ld = verify_ld(k, 1.01, 1e3, 32);
    EXPECT_TRUE(ld.holds);
    EXPECT_EQ(ld.grid.size(), 32u);
    EXPECT_DOUBLE_EQ(ld.C_G, *std::max_element(ld.ratios.begin(), ld.ratios.end()));
}

TEST(Kernel, BallAverageNewtonian) {
    // Brownian d=3: the ball average equals g(dist) outside the ball and 1.5 g(r) at the centre.
    const Kernel k = Kernel::riesz(2.0, 3);
    EXPECT_NEAR(ball_average_potential(k, 0.0, 1.0), 1.5, 1e-9);
    EXPECT_NEAR(ball_average_potential(k, 3.0, 1.0), 1.0 / 3.0, 1e-8);
    EXPECT_NEAR(ball_average_potential(k, 1.0, 1.0), 1.0, 1e-7);
    // Inside: (3 r^2 - t^2) / (2 r^3).
    EXPECT_NEAR(ball_average_potential(k, 0.5, 1.0), (3.0 - 0.25) / 2.0, 1e-7);
}
