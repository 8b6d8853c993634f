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
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace champagne {

//---------------------------------------------------------------------------//
// Errors
//---------------------------------------------------------------------------//

/// Precondition violated by the caller (bad radius, bad grid, ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Quadrature or sampling failed to converge.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Tabulated kernel queried outside its samples.
class ExtrapolationError : public DomainError {
  public:
    using DomainError::DomainError;
};

/// A constant could not be certified on the requested range.
class CertificationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw DomainError(what);
}

//---------------------------------------------------------------------------//
// Quadrature
//---------------------------------------------------------------------------//

inline constexpr double kQuadratureTol = 1e-9;

struct QuadratureResult {
    double value;
    double error;  ///< absolute error estimate reported by the integrator
    double l1;     ///< integral of |f|
};

namespace detail {
// Both integrators stop once error <= tol * L1; anything far above that
// means the depth limit was hit first.
inline QuadratureResult checked(double value, double error, double l1, const char* where) {
    QuadratureResult q{value, error, l1};
    if (!std::isfinite(value) || !(error <= 1e3 * kQuadratureTol * std::max(l1, 1e-300))) {
        throw NumericError(std::string(where) + ": quadrature did not converge (value=" +
                           std::to_string(value) + ", error estimate=" + std::to_string(error) +
                           ", L1=" + std::to_string(l1) + ")");
    }
    return q;
}
}  // namespace detail

/// Adaptive Gauss-Kronrod (15 point) on [a, b]; b may be +infinity.
template <class F>
QuadratureResult integrate_smooth(F&& f, double a, double b) {
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, 20, kQuadratureTol, &error, &l1);
    return detail::checked(value, error, l1, "integrate_smooth");
}

/// Tanh-sinh on the finite interval [a, b]; tolerates integrable endpoint
/// singularities.
template <class F>
QuadratureResult integrate_endpoint_singular(F&& f, double a, double b) {
    thread_local boost::math::quadrature::tanh_sinh<double> integrator(15);
    double error = 0.0;
    double l1 = 0.0;
    std::size_t levels = 0;
    auto f1 = [&f](double x) -> double { return f(x); };
    const double value = integrator.integrate(f1, a, b, kQuadratureTol, &error, &l1, &levels);
    return detail::checked(value, error, l1, "integrate_endpoint_singular");
}

//---------------------------------------------------------------------------//
// Grids and sums
//---------------------------------------------------------------------------//

/// n log-spaced points in [lo, hi], both endpoints included.
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    require(lo > 0.0 && hi >= lo, "log_grid: need 0 < lo <= hi");
    require(n >= 2, "log_grid: need at least 2 points");
    std::vector<double> out(n);
    const double a = std::log(lo);
    const double step = (std::log(hi) - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

/// Neumaier compensated summation.
class CompensatedSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Surface area of the unit sphere in R^d.
inline double unit_sphere_area(int d) {
    return 2.0 * std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d);
}

/// Least-squares slope of log(y) against log(x).
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "log_log_slope: need >= 2 points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

//---------------------------------------------------------------------------//
// Monotone interpolation
//---------------------------------------------------------------------------//

/// Fritsch-Carlson monotone cubic Hermite interpolant. Preserves
/// monotonicity of the data; no evaluation outside [x.front(), x.back()].
class MonotoneCubic {
  public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        require(x_.size() == y_.size() && x_.size() >= 2, "MonotoneCubic: need >= 2 points");
        const std::size_t n = x_.size();
        std::vector<double> delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        m_.assign(n, 0.0);
        m_[0] = delta[0];
        m_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            m_[i] = delta[i - 1] * delta[i] <= 0.0 ? 0.0 : 0.5 * (delta[i - 1] + delta[i]);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (delta[i] == 0.0) {
                m_[i] = m_[i + 1] = 0.0;
                continue;
            }
            const double a = m_[i] / delta[i];
            const double b = m_[i + 1] / delta[i];
            const double h = a * a + b * b;
            if (h > 9.0) {
                const double tau = 3.0 / std::sqrt(h);
                m_[i] = tau * a * delta[i];
                m_[i + 1] = tau * b * delta[i];
            }
        }
    }

    double operator()(double x) const {
        require(x >= x_.front() && x <= x_.back(), "MonotoneCubic: evaluation outside the data");
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        if (i + 1 >= x_.size()) i = x_.size() - 2;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * m_[i] +
               (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * m_[i + 1];
    }

  private:
    std::vector<double> x_, y_, m_;
};

//---------------------------------------------------------------------------//
// Exact rationals for reporting closed-form constants
//---------------------------------------------------------------------------//

/// Reduced fraction num/den with den > 0. Arithmetic returns nullopt on
/// int64 overflow instead of wrapping.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static std::optional<Rational> make(__int128 n, __int128 d) {
        if (d == 0) return std::nullopt;
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 a = n < 0 ? -n : n, b = d;
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        if (a > 1) {
            n /= a;
            d /= a;
        }
        constexpr __int128 lim = std::numeric_limits<std::int64_t>::max();
        if (n > lim || n < -lim || d > lim) return std::nullopt;
        return Rational{static_cast<std::int64_t>(n), static_cast<std::int64_t>(d)};
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
    friend bool operator==(const Rational&, const Rational&) = default;
};

inline std::optional<Rational> operator+(const Rational& a, const Rational& b) {
    return Rational::make(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                          static_cast<__int128>(a.den) * b.den);
}
inline std::optional<Rational> operator*(const Rational& a, const Rational& b) {
    return Rational::make(static_cast<__int128>(a.num) * b.num,
                          static_cast<__int128>(a.den) * b.den);
}
inline std::optional<Rational> reciprocal(const Rational& a) {
    return Rational::make(a.den, a.num);
}
inline std::optional<Rational> rational_pow(Rational base, int exponent) {
    std::optional<Rational> acc = Rational{1, 1};
    const bool invert = exponent < 0;
    for (int i = 0; i < std::abs(exponent) && acc; ++i) acc = *acc * base;
    if (acc && invert) acc = reciprocal(*acc);
    return acc;
}

/// Recognise x as a fraction with denominator <= max_den by continued
/// fractions; nullopt unless the match is exact to a few ulps.
inline std::optional<Rational> to_rational(double x, std::int64_t max_den = 1 << 20) {
    if (!std::isfinite(x)) return std::nullopt;
    const double target = x;
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double v = x;
    for (int iter = 0; iter < 64; ++iter) {
        const double a = std::floor(v);
        if (std::abs(a) > 9e15) return std::nullopt;
        const auto ai = static_cast<std::int64_t>(a);
        const std::int64_t h2 = ai * h1 + h0;
        const std::int64_t k2 = ai * k1 + k0;
        if (k2 > max_den) break;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        const double approx = static_cast<double>(h1) / static_cast<double>(k1);
        if (std::abs(approx - target) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(target))
            return Rational::make(h1, k1);
        const double frac = v - a;
        if (frac == 0.0) break;
        v = 1.0 / frac;
    }
    return std::nullopt;
}

}  // namespace champagne
