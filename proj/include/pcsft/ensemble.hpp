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

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pcsft/hilbert.hpp"
#include "pcsft/rng.hpp"

namespace pcsft {

/// Complex covariance operator B_p of a zero-mean distribution on H.
/// Hermitian and positive semidefinite; Tr B = 0 only for the degenerate
/// zero ensemble.
class CovarianceOperator {
  public:
    explicit CovarianceOperator(Matrix entries) : op_(std::move(entries)) {
        const auto eig = hermitian_eig(op_);
        const double tr = op_.entries().trace().real();
        if (eig.eigenvalues.minCoeff() < -kPsdTol * std::max(1.0, tr))
            throw NotPositiveSemidefiniteError(
                "CovarianceOperator: eigenvalue " +
                std::to_string(eig.eigenvalues.minCoeff()));
    }

    int dim() const { return op_.dim(); }
    const Matrix& entries() const { return op_.entries(); }
    const HermitianOperator& as_hermitian() const { return op_; }
    double trace() const { return op_.entries().trace().real(); }

  private:
    HermitianOperator op_;
};

struct GaussianKind {
    CovarianceOperator covariance;
};

struct TwoPointKind {
    FieldState psi; // phi = +/- psi with probability 1/2 each
};

struct MixtureComponent {
    double weight;
    FieldState psi;
};

/// Finite mixture over states; each component is implicitly symmetrized
/// (psi paired with -psi at equal weight) so the mean is zero by
/// construction.
struct FiniteMixtureKind {
    std::vector<MixtureComponent> components;
};

/// A probability distribution p on H with zero mean and finite second
/// moment, exposed as a seeded sampler.
class FieldEnsemble {
  public:
    using Kind = std::variant<GaussianKind, TwoPointKind, FiniteMixtureKind>;

    FieldEnsemble(Kind kind, std::uint64_t seed) : kind_(std::move(kind)), seed_(seed) {
        if (const auto* mix = std::get_if<FiniteMixtureKind>(&kind_)) {
            if (mix->components.empty())
                throw Error("FieldEnsemble: empty mixture");
            double total = 0.0;
            const int d = mix->components.front().psi.dim();
            for (const auto& c : mix->components) {
                if (c.weight < 0.0)
                    throw Error("FieldEnsemble: negative mixture weight");
                if (c.psi.dim() != d)
                    throw DimensionError("FieldEnsemble: mixture dimension mismatch");
                total += c.weight;
            }
            if (std::abs(total - 1.0) > 1e-12)
                throw Error("FieldEnsemble: mixture weights sum to " +
                            std::to_string(total));
        }
    }

    static FieldEnsemble gaussian(CovarianceOperator b, std::uint64_t seed = 0) {
        return FieldEnsemble(GaussianKind{std::move(b)}, seed);
    }
    static FieldEnsemble two_point(FieldState psi, std::uint64_t seed = 0) {
        return FieldEnsemble(TwoPointKind{std::move(psi)}, seed);
    }
    static FieldEnsemble finite_mixture(std::vector<MixtureComponent> comps,
                                        std::uint64_t seed = 0) {
        return FieldEnsemble(FiniteMixtureKind{std::move(comps)}, seed);
    }

    const Kind& kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }

    int dim() const {
        if (const auto* g = std::get_if<GaussianKind>(&kind_))
            return g->covariance.dim();
        if (const auto* t = std::get_if<TwoPointKind>(&kind_))
            return t->psi.dim();
        return std::get<FiniteMixtureKind>(kind_).components.front().psi.dim();
    }

    const char* kind_name() const {
        if (std::holds_alternative<GaussianKind>(kind_)) return "gaussian";
        if (std::holds_alternative<TwoPointKind>(kind_)) return "two_point";
        return "finite_mixture";
    }

  private:
    Kind kind_;
    std::uint64_t seed_;
};

struct SeedProvenance {
    std::string rng_id;
    std::uint64_t master_seed;
};

/// N samples of an ensemble. Reproducible: identical (ensemble, seed, N)
/// yields bit-identical batches.
class SampleBatch {
  public:
    SampleBatch(std::vector<FieldState> samples, SeedProvenance provenance)
        : samples_(std::move(samples)), provenance_(std::move(provenance)) {
        if (samples_.empty())
            throw EmptyBatchError("SampleBatch: N must be >= 1");
    }

    int dim() const { return samples_.front().dim(); }
    std::size_t count() const { return samples_.size(); }
    const std::vector<FieldState>& samples() const { return samples_; }
    const FieldState& operator[](std::size_t n) const { return samples_[n]; }
    const SeedProvenance& provenance() const { return provenance_; }

  private:
    std::vector<FieldState> samples_;
    SeedProvenance provenance_;
};

/// B_p in closed form: stored covariance for gaussian, |psi><psi| for
/// two_point, sum of w_i |psi_i><psi_i| for mixtures.
inline CovarianceOperator exact_covariance(const FieldEnsemble& p) {
    if (const auto* g = std::get_if<GaussianKind>(&p.kind()))
        return g->covariance;
    if (const auto* t = std::get_if<TwoPointKind>(&p.kind())) {
        const Vector& v = t->psi.amplitudes();
        return CovarianceOperator(v * v.adjoint());
    }
    const auto& mix = std::get<FiniteMixtureKind>(p.kind());
    const int d = p.dim();
    Matrix b = Matrix::Zero(d, d);
    for (const auto& c : mix.components) {
        const Vector& v = c.psi.amplitudes();
        b += c.weight * (v * v.adjoint());
    }
    return CovarianceOperator(std::move(b));
}

/// Average field energy: E_p = Tr B_p.
inline double energy_average(const FieldEnsemble& p) {
    return exact_covariance(p).trace();
}

/// E ||xi||^4, available in closed form for every ensemble kind. For the
/// circular Gaussian this is (Tr B)^2 + Tr(B^2); sign-symmetric discrete
/// kinds are constant per component.
inline double analytic_fourth_moment(const FieldEnsemble& p) {
    if (const auto* g = std::get_if<GaussianKind>(&p.kind())) {
        const Matrix& b = g->covariance.entries();
        const double tr = b.trace().real();
        const double tr2 = (b * b).trace().real();
        return tr * tr + tr2;
    }
    if (const auto* t = std::get_if<TwoPointKind>(&p.kind())) {
        const double e = field_energy(t->psi);
        return e * e;
    }
    const auto& mix = std::get<FiniteMixtureKind>(p.kind());
    double acc = 0.0;
    for (const auto& c : mix.components) {
        const double e = field_energy(c.psi);
        acc += c.weight * e * e;
    }
    return acc;
}

namespace detail {

/// Square-root factor L with L L^dagger = B, via Hermitian
/// eigendecomposition. Eigenvalues in [-psd_tol*scale, 0) are clamped to
/// zero; anything lower is a hard error (the CovarianceOperator gate
/// already enforces this, re-checked here for callers holding raw PSD
/// matrices).
inline Matrix covariance_sqrt_factor(const CovarianceOperator& b) {
    const auto eig = hermitian_eig(b.as_hermitian());
    const double scale = std::max(1.0, b.trace());
    const int d = b.dim();
    Matrix factor = eig.eigenvectors;
    for (int j = 0; j < d; ++j) {
        double lambda = eig.eigenvalues[j];
        if (lambda < -kPsdTol * scale)
            throw NotPositiveSemidefiniteError(
                "sample: covariance eigenvalue " + std::to_string(lambda));
        if (lambda < 0.0)
            lambda = 0.0;
        factor.col(j) *= std::sqrt(lambda);
    }
    return factor;
}

inline FieldState draw_sample(const FieldEnsemble& p, const Matrix* gaussian_factor,
                              std::uint64_t master_seed, std::uint64_t index) {
    auto gen = rng::sample_stream(master_seed, index);
    const int d = p.dim();
    if (std::holds_alternative<GaussianKind>(p.kind())) {
        Vector zeta(d);
        for (int j = 0; j < d; ++j)
            zeta[j] = gen.next_complex_normal();
        return FieldState(*gaussian_factor * zeta);
    }
    if (const auto* t = std::get_if<TwoPointKind>(&p.kind())) {
        const double sign = gen.next_unit() <= 0.5 ? 1.0 : -1.0;
        return FieldState(sign * t->psi.amplitudes());
    }
    const auto& mix = std::get<FiniteMixtureKind>(p.kind());
    const double u = gen.next_unit();
    double cum = 0.0;
    std::size_t pick = mix.components.size() - 1;
    for (std::size_t i = 0; i < mix.components.size(); ++i) {
        cum += mix.components[i].weight;
        if (u <= cum) {
            pick = i;
            break;
        }
    }
    const double sign = gen.next_unit() <= 0.5 ? 1.0 : -1.0;
    return FieldState(sign * mix.components[pick].psi.amplitudes());
}

} // namespace detail

/// Draws N samples. Sample n depends only on (ensemble, seed, n), so the
/// batch is identical no matter how the index range is partitioned.
inline SampleBatch sample(const FieldEnsemble& p, std::size_t n_samples,
                          std::uint64_t seed) {
    if (n_samples == 0)
        throw EmptyBatchError("sample: N must be >= 1");
    Matrix factor;
    const Matrix* factor_ptr = nullptr;
    if (const auto* g = std::get_if<GaussianKind>(&p.kind())) {
        factor = detail::covariance_sqrt_factor(g->covariance);
        factor_ptr = &factor;
    }
    std::vector<FieldState> samples;
    samples.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i)
        samples.push_back(detail::draw_sample(p, factor_ptr, seed, i));
    return SampleBatch(std::move(samples),
                       SeedProvenance{std::string(kRngId), seed});
}

inline SampleBatch sample(const FieldEnsemble& p, std::size_t n_samples) {
    return sample(p, n_samples, p.seed());
}

/// Component-wise arithmetic mean of a batch.
inline FieldState empirical_mean(const SampleBatch& batch) {
    Vector acc = Vector::Zero(batch.dim());
    for (const auto& s : batch.samples())
        acc += s.amplitudes();
    return FieldState(acc / static_cast<double>(batch.count()));
}

/// (1/N) sum |xi_n><xi_n|. No mean subtraction: the ensemble mean is zero
/// by construction.
inline CovarianceOperator empirical_covariance(const SampleBatch& batch) {
    const int d = batch.dim();
    Matrix acc = Matrix::Zero(d, d);
    for (const auto& s : batch.samples()) {
        const Vector& v = s.amplitudes();
        acc += v * v.adjoint();
    }
    acc /= static_cast<double>(batch.count());
    // Force exact conjugate symmetry lost to round-off.
    return CovarianceOperator(hermitize(acc).op.entries());
}

} // namespace pcsft
