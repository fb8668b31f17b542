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

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "pcsft/errors.hpp"

namespace pcsft {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

// Module-wide tolerances (double-precision eigensolver backward error,
// dim <= 1024).
inline constexpr double kHermTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kFormTol = 1e-10;

namespace detail {

inline double max_abs(const Matrix& m) {
    double mx = 0.0;
    for (Eigen::Index j = 0; j < m.rows(); ++j)
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            mx = std::max(mx, std::abs(m(j, k)));
    return mx;
}

inline double hermitian_deviation(const Matrix& m) {
    double dev = 0.0;
    for (Eigen::Index j = 0; j < m.rows(); ++j)
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            dev = std::max(dev, std::abs(m(j, k) - std::conj(m(k, j))));
    return dev;
}

inline bool all_finite(const Vector& v) {
    for (Eigen::Index j = 0; j < v.size(); ++j)
        if (!std::isfinite(v[j].real()) || !std::isfinite(v[j].imag()))
            return false;
    return true;
}

inline bool all_finite(const Matrix& m) {
    for (Eigen::Index j = 0; j < m.rows(); ++j)
        for (Eigen::Index k = 0; k < m.cols(); ++k)
            if (!std::isfinite(m(j, k).real()) || !std::isfinite(m(j, k).imag()))
                return false;
    return true;
}

} // namespace detail

/// A Bild-theory state: a (generally non-normalized) vector of the
/// complex Hilbert space.
class FieldState {
  public:
    explicit FieldState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() < 1)
            throw DimensionError("FieldState: dimension must be positive");
        if (!detail::all_finite(amplitudes_))
            throw Error("FieldState: non-finite amplitude");
    }

    int dim() const { return static_cast<int>(amplitudes_.size()); }
    const Vector& amplitudes() const { return amplitudes_; }
    Complex operator[](int j) const { return amplitudes_[j]; }

    static FieldState zero(int dim) { return FieldState(Vector::Zero(dim)); }
    static FieldState basis(int dim, int j) {
        Vector v = Vector::Zero(dim);
        v[j] = Complex(1.0, 0.0);
        return FieldState(v);
    }

  private:
    Vector amplitudes_;
};

/// Quantum observable A_f: a Hermitian matrix, checked on construction.
class HermitianOperator {
  public:
    explicit HermitianOperator(Matrix entries) : entries_(std::move(entries)) {
        if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
            throw DimensionError("HermitianOperator: matrix must be square");
        if (!detail::all_finite(entries_))
            throw Error("HermitianOperator: non-finite entry");
        const double scale = std::max(1.0, detail::max_abs(entries_));
        if (detail::hermitian_deviation(entries_) > kHermTol * scale)
            throw NonHermitianError("HermitianOperator: matrix is not Hermitian");
    }

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }

    static HermitianOperator identity(int dim) {
        return HermitianOperator(Matrix::Identity(dim, dim));
    }

  private:
    Matrix entries_;
};

/// Quantum state: Hermitian, positive semidefinite, unit trace.
class DensityOperator {
  public:
    explicit DensityOperator(Matrix entries);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }

    HermitianOperator as_hermitian() const { return HermitianOperator(entries_); }

  private:
    Matrix entries_;
};

/// A PCSFT physical variable f(phi) = <phi|A_f|phi>.
class QuadraticForm {
  public:
    explicit QuadraticForm(HermitianOperator generator) : generator_(std::move(generator)) {}

    int dim() const { return generator_.dim(); }
    const HermitianOperator& generator() const { return generator_; }

  private:
    HermitianOperator generator_;
};

/// Scalar product, antilinear in the FIRST argument: <a|b> = sum conj(a_j) b_j.
inline Complex inner_product(const FieldState& a, const FieldState& b) {
    if (a.dim() != b.dim())
        throw DimensionError("inner_product: dimension mismatch");
    Complex acc(0.0, 0.0);
    for (int j = 0; j < a.dim(); ++j)
        acc += std::conj(a[j]) * b[j];
    return acc;
}

/// ||phi||^2 = sum |phi_j|^2.
inline double field_energy(const FieldState& phi) {
    double acc = 0.0;
    for (int j = 0; j < phi.dim(); ++j) {
        const Complex z = phi[j];
        acc += z.real() * z.real() + z.imag() * z.imag();
    }
    return acc;
}

/// <phi|A_f|phi>, real up to form_tol. The summation order matches
/// field_energy so that the identity generator reproduces it exactly.
inline double quadratic_form(const QuadraticForm& f, const FieldState& phi) {
    if (f.dim() != phi.dim())
        throw DimensionError("quadratic_form: dimension mismatch");
    const Matrix& a = f.generator().entries();
    const int d = phi.dim();
    Complex acc(0.0, 0.0);
    for (int j = 0; j < d; ++j) {
        Complex row(0.0, 0.0);
        for (int k = 0; k < d; ++k)
            row += a(j, k) * phi[k];
        acc += std::conj(phi[j]) * row;
    }
    if (std::abs(acc.imag()) > kFormTol * (1.0 + std::abs(acc.real())))
        throw NonHermitianError("quadratic_form: imaginary residue " +
                                std::to_string(acc.imag()));
    return acc.real();
}

/// Tr(B A). Real when both arguments are Hermitian.
inline double trace_pairing(const HermitianOperator& b, const HermitianOperator& a) {
    if (b.dim() != a.dim())
        throw DimensionError("trace_pairing: dimension mismatch");
    const Complex t = (b.entries() * a.entries()).trace();
    if (std::abs(t.imag()) > kFormTol * (1.0 + std::abs(t.real())))
        throw NonHermitianError("trace_pairing: non-real trace");
    return t.real();
}

struct HermitizeResult {
    HermitianOperator op;
    double deviation; // max |M_jk - conj(M_kj)| of the input
};

/// (M + M^dagger)/2, reporting how far the input was from Hermitian.
inline HermitizeResult hermitize(const Matrix& m) {
    if (m.rows() != m.cols())
        throw DimensionError("hermitize: matrix must be square");
    const double dev = detail::hermitian_deviation(m);
    Matrix h = (m + m.adjoint()) / 2.0;
    // Round-off can leave a residue above the constructor gate; force
    // exact conjugate symmetry entry by entry.
    for (Eigen::Index j = 0; j < h.rows(); ++j) {
        h(j, j) = Complex(h(j, j).real(), 0.0);
        for (Eigen::Index k = j + 1; k < h.cols(); ++k)
            h(k, j) = std::conj(h(j, k));
    }
    return HermitizeResult{HermitianOperator(h), dev};
}

struct Eigendecomposition {
    Eigen::VectorXd eigenvalues; // ascending
    Matrix eigenvectors;         // unitary, column j pairs with eigenvalue j
};

/// Hermitian eigendecomposition: real eigenvalues sorted ascending,
/// unitary eigenvectors.
inline Eigendecomposition hermitian_eig(const HermitianOperator& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(a.entries());
    if (solver.info() != Eigen::Success)
        throw Error("hermitian_eig: eigensolver failed to converge");
    return Eigendecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

inline DensityOperator::DensityOperator(Matrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
        throw DimensionError("DensityOperator: matrix must be square");
    HermitianOperator herm(entries_); // Hermitian gate
    const double tr = entries_.trace().real();
    if (std::abs(tr - 1.0) > kTraceTol)
        throw Error("DensityOperator: trace deviates from 1 by " +
                    std::to_string(tr - 1.0));
    const auto eig = hermitian_eig(herm);
    const double min_eig = eig.eigenvalues.minCoeff();
    if (min_eig < -kPsdTol * std::max(1.0, tr))
        throw NotPositiveSemidefiniteError(
            "DensityOperator: eigenvalue " + std::to_string(min_eig));
}

} // namespace pcsft
