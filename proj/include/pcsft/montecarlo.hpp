// Copyright 2026 The pcsft Authors.

// Licensed under the Apache License, Version 2.0 (the License);
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

// http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an AS IS BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "pcsft/correspondence.hpp"
#include "pcsft/ensemble.hpp"

namespace pcsft {

/// Welford accumulator: single-pass (count, mean, M2).
struct RunningMoments {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double x) {
        ++count;
        const double delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (x - mean);
    }

    /// Chan et al. pairwise combination.
    static RunningMoments merge(const RunningMoments& a, const RunningMoments& b) {
        if (a.count == 0) return b;
        if (b.count == 0) return a;
        RunningMoments out;
        out.count = a.count + b.count;
        const double na = static_cast<double>(a.count);
        const double nb = static_cast<double>(b.count);
        const double n = na + nb;
        const double delta = b.mean - a.mean;
        out.mean = a.mean + delta * nb / n;
        out.m2 = a.m2 + b.m2 + delta * delta * na * nb / n;
        return out;
    }

    double variance() const {
        return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    }
    double std_error() const {
        return std::sqrt(variance() / static_cast<double>(count));
    }
};

struct EstimateReport {
    double estimate;
    double std_error;
    std::uint64_t n;
    std::optional<double> target;
    std::optional<double> z_score;
    SeedProvenance provenance;
};

namespace detail {

// Fixed block size: per-block moments depend only on the sample indices
// inside the block, and blocks merge in a fixed balanced tree, so the
// result is identical for any worker count.
inline constexpr std::size_t kMomentBlock = 4096;

inline RunningMoments tree_merge(std::vector<RunningMoments> blocks) {
    if (blocks.empty()) return RunningMoments{};
    while (blocks.size() > 1) {
        std::vector<RunningMoments> next;
        next.reserve((blocks.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < blocks.size(); i += 2)
            next.push_back(RunningMoments::merge(blocks[i], blocks[i + 1]));
        if (blocks.size() % 2 == 1)
            next.push_back(blocks.back());
        blocks = std::move(next);
    }
    return blocks.front();
}

inline RunningMoments streamed_form_moments(const FieldEnsemble& p,
                                            const QuadraticForm& f, std::size_t n,
                                            std::uint64_t seed, unsigned workers) {
    Matrix factor;
    const Matrix* factor_ptr = nullptr;
    if (const auto* g = std::get_if<GaussianKind>(&p.kind())) {
        factor = covariance_sqrt_factor(g->covariance);
        factor_ptr = &factor;
    }
    const std::size_t n_blocks = (n + kMomentBlock - 1) / kMomentBlock;
    std::vector<RunningMoments> blocks(n_blocks);
    auto run_block = [&](std::size_t b) {
        const std::size_t lo = b * kMomentBlock;
        const std::size_t hi = std::min(n, lo + kMomentBlock);
        RunningMoments acc;
        for (std::size_t i = lo; i < hi; ++i) {
            const FieldState xi = draw_sample(p, factor_ptr, seed, i);
            acc.push(quadratic_form(f, xi));
        }
        blocks[b] = acc;
    };
    if (workers <= 1 || n_blocks <= 1) {
        for (std::size_t b = 0; b < n_blocks; ++b)
            run_block(b);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t b = w; b < n_blocks; b += workers)
                    run_block(b);
            });
        for (auto& t : pool)
            t.join();
    }
    return tree_merge(std::move(blocks));
}

} // namespace detail

/// Streams N samples of f(xi) in constant memory and reports the mean,
/// its standard error, and the z-score against the exact trace value.
inline EstimateReport estimate_average(const FieldEnsemble& p, const QuadraticForm& f,
                                       std::size_t n, std::uint64_t seed,
                                       unsigned workers = 1) {
    if (n < 2)
        throw EmptyBatchError("estimate_average: N must be >= 2");
    if (p.dim() != f.dim())
        throw DimensionError("estimate_average: dimension mismatch");
    const RunningMoments mom = detail::streamed_form_moments(p, f, n, seed, workers);
    const double target = bild_average_exact(p, f);
    const double se = mom.std_error();
    std::optional<double> z;
    if (se > 0.0)
        z = (mom.mean - target) / se;
    else if (std::abs(mom.mean - target) <= 1e-12 * (1.0 + std::abs(target)))
        z = 0.0;
    return EstimateReport{mom.mean, se, mom.count, target, z,
                          SeedProvenance{std::string(kRngId), seed}};
}

/// One report per N, each from an independent sub-seed.
inline std::vector<EstimateReport> convergence_sweep(const FieldEnsemble& p,
                                                     const QuadraticForm& f,
                                                     const std::vector<std::size_t>& n_list,
                                                     std::uint64_t seed,
                                                     unsigned workers = 1) {
    if (n_list.size() < 3)
        throw Error("convergence_sweep: need at least 3 values of N");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw Error("convergence_sweep: N_list must be ascending");
    std::vector<EstimateReport> reports;
    reports.reserve(n_list.size());
    for (std::size_t i = 0; i < n_list.size(); ++i)
        reports.push_back(estimate_average(p, f, n_list[i],
                                           rng::substream_seed(seed, i), workers));
    return reports;
}

/// Least-squares slope of log|error| against log N.
inline double loglog_error_slope(const std::vector<std::size_t>& n_list,
                                 const std::vector<double>& abs_errors) {
    const std::size_t m = n_list.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = std::log(static_cast<double>(n_list[i]));
        const double y = std::log(std::max(abs_errors[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double dm = static_cast<double>(m);
    return (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
}

/// Closed-form Var[f(xi)] for the circular Gaussian: Tr((A B)^2).
inline double gaussian_form_variance(const CovarianceOperator& b,
                                     const QuadraticForm& f) {
    const Matrix ab = f.generator().entries() * b.entries();
    return (ab * ab).trace().real();
}

} // namespace pcsft
