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

#include <functional>
#include <utility>

#include "pcsft/ensemble.hpp"
#include "pcsft/hilbert.hpp"

namespace pcsft {

inline constexpr double kResidualTol = 1e-10;

/// J: distributions on H -> density operators. rho_p = B_p / Tr B_p.
inline DensityOperator map_J(const FieldEnsemble& p) {
    const CovarianceOperator b = exact_covariance(p);
    const double energy = b.trace();
    if (energy <= 0.0)
        throw DegenerateEnsembleError("map_J: zero average energy");
    return DensityOperator(b.entries() / energy);
}

/// J*: quadratic forms -> Hermitian observables. Exact and injective:
/// the generator matrix itself.
inline HermitianOperator map_Jstar(const QuadraticForm& f) {
    return f.generator();
}

/// Recovers the Hermitian generator of a black-box quadratic form by
/// polarization:
///   A_jj      = f(e_j)
///   Re A_jk   =  (f(e_j + e_k)   - f(e_j) - f(e_k)) / 2
///   Im A_jk   = -(f(e_j + i e_k) - f(e_j) - f(e_k)) / 2
/// The minus-sign evaluations f(e_j - e_k), f(e_j - i e_k) give a
/// redundancy check that rejects callables that are not quadratic forms.
inline HermitianOperator reconstruct_generator(
    const std::function<double(const FieldState&)>& eval, int dim) {
    if (dim < 1)
        throw DimensionError("reconstruct_generator: dimension must be positive");
    Matrix a = Matrix::Zero(dim, dim);
    Eigen::VectorXd diag(dim);
    for (int j = 0; j < dim; ++j) {
        diag[j] = eval(FieldState::basis(dim, j));
        a(j, j) = Complex(diag[j], 0.0);
    }
    const double zero_val = eval(FieldState::zero(dim));
    double consistency = std::abs(zero_val);
    for (int j = 0; j < dim; ++j) {
        for (int k = j + 1; k < dim; ++k) {
            Vector plus = Vector::Zero(dim), minus = Vector::Zero(dim);
            plus[j] = 1.0;
            plus[k] = 1.0;
            minus[j] = 1.0;
            minus[k] = -1.0;
            const double fp = eval(FieldState(plus));
            const double fm = eval(FieldState(minus));
            plus[k] = Complex(0.0, 1.0);
            minus[k] = Complex(0.0, -1.0);
            const double fip = eval(FieldState(plus));
            const double fim = eval(FieldState(minus));
            const double re = (fp - diag[j] - diag[k]) / 2.0;
            const double im = -(fip - diag[j] - diag[k]) / 2.0;
            a(j, k) = Complex(re, im);
            a(k, j) = Complex(re, -im);
            // For a genuine quadratic form, f(e_j+e_k)+f(e_j-e_k) and
            // f(e_j+ie_k)+f(e_j-ie_k) both equal 2f(e_j)+2f(e_k).
            const double parallelogram = 2.0 * (diag[j] + diag[k]);
            const double scale = 1.0 + std::abs(parallelogram);
            consistency = std::max(consistency,
                                   std::abs(fp + fm - parallelogram) / scale);
            consistency = std::max(consistency,
                                   std::abs(fip + fim - parallelogram) / scale);
        }
    }
    if (consistency > 1e-9)
        throw NotAQuadraticFormError(
            "reconstruct_generator: polarization inconsistency " +
            std::to_string(consistency));
    try {
        return HermitianOperator(std::move(a));
    } catch (const NonHermitianError&) {
        throw NotAQuadraticFormError(
            "reconstruct_generator: reconstructed matrix is not Hermitian");
    }
}

/// <f>_p = Tr B_p A_f, closed form, valid for every ensemble kind since
/// it depends only on second moments.
inline double bild_average_exact(const FieldEnsemble& p, const QuadraticForm& f) {
    if (p.dim() != f.dim())
        throw DimensionError("bild_average_exact: dimension mismatch");
    return trace_pairing(exact_covariance(p).as_hermitian(), f.generator());
}

/// Tr(rho A).
inline double qm_average(const DensityOperator& rho, const HermitianOperator& a) {
    if (rho.dim() != a.dim())
        throw DimensionError("qm_average: dimension mismatch");
    return trace_pairing(rho.as_hermitian(), a);
}

struct AverageMatchReport {
    double lhs;      // <f>_p / E_p
    double rhs;      // Tr rho_p A_f
    double residual; // |lhs - rhs|
    double energy;   // E_p
    int dim;
    bool passed;
};

/// Checks that the scaled Bild average matches the quantum trace average.
inline AverageMatchReport verify_average_correspondence(const FieldEnsemble& p, const QuadraticForm& f,
                                     double tol = kResidualTol) {
    const double energy = energy_average(p);
    if (energy <= 0.0)
        throw DegenerateEnsembleError("verify_average_correspondence: zero average energy");
    const double lhs = bild_average_exact(p, f) / energy;
    const double rhs = qm_average(map_J(p), map_Jstar(f));
    const double residual = std::abs(lhs - rhs);
    return AverageMatchReport{lhs, rhs, residual, energy, p.dim(),
                              residual <= tol * (1.0 + std::abs(rhs))};
}

/// g_p = f / E_p: the rescaled variable whose plain Bild average equals
/// the quantum average of A_f.
inline QuadraticForm amplified_variable(const QuadraticForm& f, const FieldEnsemble& p) {
    const double energy = energy_average(p);
    if (energy <= 0.0)
        throw DegenerateEnsembleError("amplified_variable: zero average energy");
    return QuadraticForm(HermitianOperator(f.generator().entries() / energy));
}

/// Constructive preimage of any density operator: gaussian(scale * rho)
/// maps back to rho under J.
inline FieldEnsemble audit_J_surjective(const DensityOperator& rho, double scale,
                                        std::uint64_t seed = 0) {
    if (scale <= 0.0)
        throw InvalidScaleError("audit_J_surjective: scale must be positive");
    return FieldEnsemble::gaussian(CovarianceOperator(scale * rho.entries()), seed);
}

struct ManyToOneWitness {
    FieldEnsemble first;
    FieldEnsemble second;
    double fourth_moment_first;
    double fourth_moment_second;
};

/// Two distinct ensembles with the same J image. For rank-one rho the
/// witness is gaussian vs two_point (distinguishable fourth moments);
/// otherwise two gaussians at different energy scales.
inline ManyToOneWitness audit_J_many_to_one(const DensityOperator& rho,
                                            std::uint64_t seed = 0) {
    const auto eig = hermitian_eig(rho.as_hermitian());
    const int d = rho.dim();
    const bool rank_one = d >= 2 && eig.eigenvalues[d - 2] < 1e-12;
    if (rank_one) {
        const Vector psi = eig.eigenvectors.col(d - 1) *
                           std::sqrt(eig.eigenvalues[d - 1]);
        FieldEnsemble g = FieldEnsemble::gaussian(
            CovarianceOperator(psi * psi.adjoint()), seed);
        FieldEnsemble t = FieldEnsemble::two_point(FieldState(psi), seed);
        return ManyToOneWitness{g, t, analytic_fourth_moment(g),
                                analytic_fourth_moment(t)};
    }
    FieldEnsemble g1 = FieldEnsemble::gaussian(CovarianceOperator(rho.entries()), seed);
    FieldEnsemble g2 = FieldEnsemble::gaussian(
        CovarianceOperator(2.0 * rho.entries()), seed);
    return ManyToOneWitness{g1, g2, analytic_fourth_moment(g1),
                            analytic_fourth_moment(g2)};
}

} // namespace pcsft
