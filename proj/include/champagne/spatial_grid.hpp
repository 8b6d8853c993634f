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
#include <span>
#include <utility>
#include <vector>

#include "champagne/numeric.hpp"

namespace champagne {

/// Uniform cell grid over a set of balls in R^d.
///
/// The grid box is the bounding box of the centres padded by one cell, and
/// the cell width h exceeds every radius. Any centre outside the 3^d block
/// around a query point is therefore at least h away from it.
class BallIndex {
  public:
    BallIndex() = default;

    BallIndex(int d, std::span<const double> centers, std::span<const double> radii) : d_(d) {
        require(d >= 1, "BallIndex: dimension must be positive");
        require(centers.size() == radii.size() * static_cast<std::size_t>(d),
                "BallIndex: centre/radius count mismatch");
        n_ = radii.size();
        if (n_ == 0) return;

        std::vector<double> lo(d, std::numeric_limits<double>::infinity());
        std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < n_; ++i) {
            r_max_ = std::max(r_max_, radii[i]);
            for (int k = 0; k < d; ++k) {
                lo[k] = std::min(lo[k], centers[i * d + k]);
                hi[k] = std::max(hi[k], centers[i * d + k]);
            }
        }
        bbox_lo_ = lo;
        bbox_hi_ = hi;
        double volume = 1.0;
        for (int k = 0; k < d; ++k) volume *= std::max(hi[k] - lo[k], 1e-12);
        h_ = std::max(2.05 * r_max_, 0.8 * std::pow(volume / static_cast<double>(n_), 1.0 / d));
        if (!(h_ > 0.0) || !std::isfinite(h_)) h_ = std::max(2.05 * r_max_, 1.0);

        // Keep the cell count bounded.
        for (;;) {
            double total = 1.0;
            for (int k = 0; k < d; ++k) total *= std::ceil((hi[k] - lo[k]) / h_) + 2.0;
            if (total <= double(1 << 24)) break;
            h_ *= 1.5;
        }
        origin_.resize(d);
        dims_.resize(d);
        stride_.resize(d);
        std::size_t total = 1;
        for (int k = 0; k < d; ++k) {
            origin_[k] = lo[k] - h_;
            dims_[k] = static_cast<std::int64_t>(std::ceil((hi[k] - lo[k]) / h_)) + 2;
            stride_[k] = total;
            total *= static_cast<std::size_t>(dims_[k]);
        }

        std::vector<std::size_t> cell_of(n_);
        cell_start_.assign(total + 1, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            cell_of[i] = linear_cell(&centers[i * d]);
            ++cell_start_[cell_of[i] + 1];
        }
        for (std::size_t c = 0; c < total; ++c) cell_start_[c + 1] += cell_start_[c];
        std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
        packed_.resize(n_ * (d + 1));
        order_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t slot = fill[cell_of[i]]++;
            order_[slot] = i;
            for (int k = 0; k < d; ++k) packed_[slot * (d + 1) + k] = centers[i * d + k];
            packed_[slot * (d + 1) + d] = radii[i];
        }
    }

    int dim() const { return d_; }
    std::size_t size() const { return n_; }
    double cell_width() const { return h_; }
    double max_radius() const { return r_max_; }

    /// Lower bound on the signed distance from x to the union of balls
    /// (negative inside). Exact whenever the true distance is below
    /// h - r_max; +inf for an empty index.
    double distance_bound(const double* x) const {
        if (n_ == 0) return std::numeric_limits<double>::infinity();
        if (d_ == 3) return distance_bound_fixed<3>(x);
        if (d_ == 2) return distance_bound_fixed<2>(x);
        std::int64_t cell[kMaxDim];
        bool inside_grid = true;
        double box_gap2 = 0.0;
        for (int k = 0; k < d_; ++k) {
            const double g = std::max({bbox_lo_[k] - x[k], x[k] - bbox_hi_[k], 0.0});
            box_gap2 += g * g;
            cell[k] = static_cast<std::int64_t>(std::floor((x[k] - origin_[k]) / h_));
            if (cell[k] < 0 || cell[k] >= dims_[k]) inside_grid = false;
        }
        if (!inside_grid) return std::sqrt(box_gap2) - r_max_;

        // distance from x to the outside of its 3^d block
        double block_gap = std::numeric_limits<double>::infinity();
        for (int k = 0; k < d_; ++k) {
            const double cell_lo = origin_[k] + static_cast<double>(cell[k]) * h_;
            block_gap = std::min({block_gap, x[k] - (cell_lo - h_), (cell_lo + 2.0 * h_) - x[k]});
        }
        double best = block_gap - r_max_;
        scan_block(cell, 1, [&](std::size_t slot) {
            const double* p = &packed_[slot * (d_ + 1)];
            double s = 0.0;
            for (int k = 0; k < d_; ++k) {
                const double t = x[k] - p[k];
                s += t * t;
            }
            const double lim = best + p[d_];
            if (lim > 0.0 && s >= lim * lim) return;
            best = std::min(best, std::sqrt(s) - p[d_]);
        });
        return best;
    }

    bool contains(const double* x) const { return n_ > 0 && distance_bound(x) < 0.0; }

    /// Calls fn(original index) for every ball whose centre lies within
    /// `radius` of x.
    template <class Fn>
    void for_each_within(const double* x, double radius, Fn&& fn) const {
        if (n_ == 0) return;
        std::int64_t lo[kMaxDim], hi[kMaxDim];
        for (int k = 0; k < d_; ++k) {
            lo[k] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((x[k] - radius - origin_[k]) / h_)));
            hi[k] = std::min<std::int64_t>(dims_[k] - 1,
                                           static_cast<std::int64_t>(std::floor((x[k] + radius - origin_[k]) / h_)));
            if (lo[k] > hi[k]) return;
        }
        const double r2 = radius * radius;
        scan_box(lo, hi, [&](std::size_t slot) {
            const double* p = &packed_[slot * (d_ + 1)];
            double s = 0.0;
            for (int k = 0; k < d_; ++k) {
                const double t = x[k] - p[k];
                s += t * t;
            }
            if (s <= r2) fn(order_[slot]);
        });
    }

    /// Distance from centre i to the nearest other centre (+inf if alone).
    double nearest_center_distance(std::size_t i) const {
        return nearest_impl(center_of_original(i), i);
    }

    /// Distance from an arbitrary point to the nearest centre (+inf if empty).
    double nearest_center_distance(const double* x) const { return nearest_impl(x, n_); }

    /// Index pairs (i < j) with |z_i - z_j| < r_i + r_j.
    std::vector<std::pair<std::size_t, std::size_t>> overlapping_pairs() const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t slot = 0; slot < n_; ++slot) {
            const std::size_t i = order_[slot];
            const double* zi = &packed_[slot * (d_ + 1)];
            const double ri = zi[d_];
            for_each_within(zi, ri + r_max_, [&](std::size_t j) {
                if (j <= i) return;
                const double* zj = center_of_original(j);
                double s = 0.0;
                for (int k = 0; k < d_; ++k) {
                    const double t = zi[k] - zj[k];
                    s += t * t;
                }
                const double rr = ri + radius_of_original(j);
                if (s < rr * rr) out.emplace_back(i, j);
            });
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    static constexpr int kMaxDim = 16;

  private:
    template <int D>
    double distance_bound_fixed(const double* x) const {
        std::int64_t cell[D];
        bool inside_grid = true;
        double box_gap2 = 0.0;
        for (int k = 0; k < D; ++k) {
            const double g = std::max(std::max(bbox_lo_[k] - x[k], x[k] - bbox_hi_[k]), 0.0);
            box_gap2 += g * g;
            cell[k] = static_cast<std::int64_t>(std::floor((x[k] - origin_[k]) / h_));
            inside_grid = inside_grid && cell[k] >= 0 && cell[k] < dims_[k];
        }
        if (!inside_grid) return std::sqrt(box_gap2) - r_max_;
        double best = std::numeric_limits<double>::infinity();
        std::int64_t lo[D], hi[D];
        for (int k = 0; k < D; ++k) {
            const double cell_lo = origin_[k] + static_cast<double>(cell[k]) * h_;
            best = std::min(best, std::min(x[k] - (cell_lo - h_), (cell_lo + 2.0 * h_) - x[k]));
            lo[k] = std::max<std::int64_t>(0, cell[k] - 1);
            hi[k] = std::min<std::int64_t>(dims_[k] - 1, cell[k] + 1);
        }
        best -= r_max_;
        auto scan_run = [&](std::size_t base) {
            const std::size_t first = cell_start_[base + static_cast<std::size_t>(lo[0])];
            const std::size_t last = cell_start_[base + static_cast<std::size_t>(hi[0]) + 1];
            const double* p = &packed_[first * (D + 1)];
            for (std::size_t s = first; s < last; ++s, p += D + 1) {
                double q = 0.0;
                for (int k = 0; k < D; ++k) {
                    const double t = x[k] - p[k];
                    q += t * t;
                }
                const double lim = best + p[D];
                if (lim > 0.0 && q >= lim * lim) continue;
                best = std::min(best, std::sqrt(q) - p[D]);
            }
        };
        if constexpr (D == 2) {
            for (std::int64_t j = lo[1]; j <= hi[1]; ++j) scan_run(static_cast<std::size_t>(j) * stride_[1]);
        } else {
            for (std::int64_t i = lo[2]; i <= hi[2]; ++i)
                for (std::int64_t j = lo[1]; j <= hi[1]; ++j)
                    scan_run(static_cast<std::size_t>(j) * stride_[1] + static_cast<std::size_t>(i) * stride_[2]);
        }
        return best;
    }

    double nearest_impl(const double* z, std::size_t exclude) const {
        double best2 = std::numeric_limits<double>::infinity();
        if (n_ == 0) return best2;
        std::int64_t c[kMaxDim];
        std::int64_t max_ring = 0;
        bool inside_grid = true;
        for (int k = 0; k < d_; ++k) {
            c[k] = static_cast<std::int64_t>(std::floor((z[k] - origin_[k]) / h_));
            if (c[k] < 0 || c[k] >= dims_[k]) inside_grid = false;
            max_ring = std::max(max_ring, dims_[k]);
        }
        auto visit = [&](std::size_t slot) {
            if (order_[slot] == exclude) return;
            const double* p = &packed_[slot * (d_ + 1)];
            double s = 0.0;
            for (int k = 0; k < d_; ++k) {
                const double t = z[k] - p[k];
                s += t * t;
            }
            best2 = std::min(best2, s);
        };
        if (!inside_grid) {
            for (std::size_t slot = 0; slot < n_; ++slot) visit(slot);
            return std::sqrt(best2);
        }
        // Grow the searched cube one ring at a time; cells outside a cube of
        // Chebyshev radius `ring` are at least ring * h away.
        std::int64_t prev_lo[kMaxDim], prev_hi[kMaxDim];
        for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
            std::int64_t lo[kMaxDim], hi[kMaxDim];
            for (int k = 0; k < d_; ++k) {
                lo[k] = std::max<std::int64_t>(0, c[k] - ring);
                hi[k] = std::min<std::int64_t>(dims_[k] - 1, c[k] + ring);
            }
            if (ring == 0) {
                scan_box(lo, hi, visit);
            } else {
                // Slabs of the new cube not covered by the previous one.
                std::int64_t slo[kMaxDim], shi[kMaxDim];
                for (int k = 0; k < d_; ++k) {
                    for (int j = 0; j < d_; ++j) {
                        slo[j] = j < k ? prev_lo[j] : lo[j];
                        shi[j] = j < k ? prev_hi[j] : hi[j];
                    }
                    if (lo[k] < prev_lo[k]) {
                        slo[k] = shi[k] = lo[k];
                        scan_box(slo, shi, visit);
                    }
                    if (hi[k] > prev_hi[k]) {
                        slo[k] = shi[k] = hi[k];
                        scan_box(slo, shi, visit);
                    }
                }
            }
            for (int k = 0; k < d_; ++k) {
                prev_lo[k] = lo[k];
                prev_hi[k] = hi[k];
            }
            const double reach = static_cast<double>(ring) * h_;
            if (best2 <= reach * reach) break;
        }
        return std::sqrt(best2);
    }

    std::size_t linear_cell(const double* x) const {
        std::size_t idx = 0;
        for (int k = 0; k < d_; ++k) {
            auto c = static_cast<std::int64_t>(std::floor((x[k] - origin_[k]) / h_));
            c = std::clamp<std::int64_t>(c, 0, dims_[k] - 1);
            idx += static_cast<std::size_t>(c) * stride_[k];
        }
        return idx;
    }

    const double* center_of_original(std::size_t i) const {
        if (slot_of_.empty()) {
            slot_of_.resize(n_);
            for (std::size_t s = 0; s < n_; ++s) slot_of_[order_[s]] = s;
        }
        return &packed_[slot_of_[i] * (d_ + 1)];
    }
    double radius_of_original(std::size_t i) const { return center_of_original(i)[d_]; }

    template <class Fn>
    void scan_block(const std::int64_t* cell, std::int64_t reach, Fn&& fn) const {
        std::int64_t lo[kMaxDim], hi[kMaxDim];
        for (int k = 0; k < d_; ++k) {
            lo[k] = std::max<std::int64_t>(0, cell[k] - reach);
            hi[k] = std::min<std::int64_t>(dims_[k] - 1, cell[k] + reach);
        }
        scan_box(lo, hi, fn);
    }

    template <class Fn>
    void scan_box(const std::int64_t* lo, const std::int64_t* hi, Fn&& fn) const {
        std::int64_t cur[kMaxDim];
        for (int k = 0; k < d_; ++k) cur[k] = lo[k];
        // Innermost dimension 0 is contiguous in the linear layout.
        for (;;) {
            std::size_t base = 0;
            for (int k = 1; k < d_; ++k) base += static_cast<std::size_t>(cur[k]) * stride_[k];
            const std::size_t first = cell_start_[base + static_cast<std::size_t>(lo[0])];
            const std::size_t last = cell_start_[base + static_cast<std::size_t>(hi[0]) + 1];
            for (std::size_t s = first; s < last; ++s) fn(s);
            int k = 1;
            for (; k < d_; ++k) {
                if (++cur[k] <= hi[k]) break;
                cur[k] = lo[k];
            }
            if (k >= d_) break;
        }
    }

    int d_ = 0;
    std::size_t n_ = 0;
    double h_ = 1.0;
    double r_max_ = 0.0;
    std::vector<double> origin_, bbox_lo_, bbox_hi_;
    std::vector<std::int64_t> dims_;
    std::vector<std::size_t> stride_;
    std::vector<std::size_t> cell_start_;
    std::vector<double> packed_;
    std::vector<std::size_t> order_;
    mutable std::vector<std::size_t> slot_of_;
};

/// O(n^2) reference for BallIndex::overlapping_pairs.
inline std::vector<std::pair<std::size_t, std::size_t>> overlapping_pairs_bruteforce(
    int d, std::span<const double> centers, std::span<const double> radii) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (std::size_t j = i + 1; j < radii.size(); ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) {
                const double t = centers[i * d + k] - centers[j * d + k];
                s += t * t;
            }
            const double rr = radii[i] + radii[j];
            if (s < rr * rr) out.emplace_back(i, j);
        }
    return out;
}

}  // namespace champagne
