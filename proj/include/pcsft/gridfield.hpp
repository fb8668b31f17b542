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

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pcsft/ensemble.hpp"
#include "pcsft/hilbert.hpp"

namespace pcsft {

enum class QuadratureRule { trapezoid, midpoint };

struct GridAxis {
    double lo;
    double hi;
    int points;
};

/// Rectangular grid (1-d or 2-d) with positive quadrature weights that
/// sum to the domain volume.
class Grid {
  public:
    explicit Grid(std::vector<GridAxis> axes,
                  QuadratureRule rule = QuadratureRule::trapezoid)
        : axes_(std::move(axes)), rule_(rule) {
        if (axes_.empty() || axes_.size() > 2)
            throw Error("Grid: only 1 or 2 spatial dimensions supported");
        for (const auto& ax : axes_) {
            if (!std::isfinite(ax.lo) || !std::isfinite(ax.hi) || ax.lo >= ax.hi)
                throw Error("Grid: axis bounds must be finite with lo < hi");
            if (ax.points < 2)
                throw Error("Grid: need at least 2 points per axis");
        }
        build();
    }

    int spatial_dim() const { return static_cast<int>(axes_.size()); }
    const std::vector<GridAxis>& axes() const { return axes_; }
    QuadratureRule rule() const { return rule_; }
    int point_count() const { return static_cast<int>(weights_.size()); }
    const std::vector<double>& weights() const { return weights_; }
    /// Coordinates of flattened point i (row-major over axes).
    const std::vector<std::array<double, 2>>& coordinates() const { return coords_; }

    bool operator==(const Grid& other) const {
        if (axes_.size() != other.axes_.size() || rule_ != other.rule_)
            return false;
        for (std::size_t a = 0; a < axes_.size(); ++a)
            if (axes_[a].lo != other.axes_[a].lo || axes_[a].hi != other.axes_[a].hi ||
                axes_[a].points != other.axes_[a].points)
                return false;
        return true;
    }

  private:
    void build() {
        std::vector<std::vector<double>> axis_w, axis_x;
        for (const auto& ax : axes_) {
            std::vector<double> w(ax.points), x(ax.points);
            if (rule_ == QuadratureRule::trapezoid) {
                const double h = (ax.hi - ax.lo) / (ax.points - 1);
                for (int i = 0; i < ax.points; ++i) {
                    x[i] = ax.lo + h * i;
                    w[i] = (i == 0 || i == ax.points - 1) ? h / 2.0 : h;
                }
            } else {
                const double h = (ax.hi - ax.lo) / ax.points;
                for (int i = 0; i < ax.points; ++i) {
                    x[i] = ax.lo + h * (i + 0.5);
                    w[i] = h;
                }
            }
            axis_w.push_back(std::move(w));
            axis_x.push_back(std::move(x));
        }
        if (axes_.size() == 1) {
            weights_ = axis_w[0];
            coords_.resize(axis_x[0].size());
            for (std::size_t i = 0; i < axis_x[0].size(); ++i)
                coords_[i] = {axis_x[0][i], 0.0};
        } else {
            weights_.reserve(axis_w[0].size() * axis_w[1].size());
            coords_.reserve(weights_.capacity());
            for (std::size_t i = 0; i < axis_w[0].size(); ++i)
                for (std::size_t j = 0; j < axis_w[1].size(); ++j) {
                    weights_.push_back(axis_w[0][i] * axis_w[1][j]);
                    coords_.push_back({axis_x[0][i], axis_x[1][j]});
                }
        }
    }

    std::vector<GridAxis> axes_;
    QuadratureRule rule_;
    std::vector<double> weights_;
    std::vector<std::array<double, 2>> coords_;
};

/// A discretized L2 field: one complex value per grid point.
class GridField {
  public:
    GridField(Grid grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
        if (values_.size() != grid_.point_count())
            throw GridMismatchError("GridField: value count does not match grid");
        if (!detail::all_finite(values_))
            throw Error("GridField: non-finite value");
    }

    const Grid& grid() const { return grid_; }
    const Vector& values() const { return values_; }

    static GridField from_function(const Grid& grid,
                                   const std::function<Complex(double, double)>& f) {
        Vector v(grid.point_count());
        for (int i = 0; i < grid.point_count(); ++i)
            v[i] = f(grid.coordinates()[i][0], grid.coordinates()[i][1]);
        return GridField(grid, std::move(v));
    }

    /// Weighted embedding into the plain Hilbert module: amplitudes
    /// sqrt(w_i) * phi_i, an isometry for the quadrature inner product.
    FieldState embed() const {
        Vector v(values_.size());
        for (Eigen::Index i = 0; i < values_.size(); ++i)
            v[i] = std::sqrt(grid_.weights()[i]) * values_[i];
        return FieldState(std::move(v));
    }

  private:
    Grid grid_;
    Vector values_;
};

/// Quadrature form of the L2 pairing: sum w_i conj(a_i) b_i.
inline Complex grid_inner_product(const GridField& a, const GridField& b) {
    if (!(a.grid() == b.grid()))
        throw GridMismatchError("grid_inner_product: grids differ");
    Complex acc(0.0, 0.0);
    for (Eigen::Index i = 0; i < a.values().size(); ++i)
        acc += a.grid().weights()[i] * std::conj(a.values()[i]) * b.values()[i];
    return acc;
}

/// Field energy: sum w_i |phi_i|^2.
inline double grid_field_energy(const GridField& phi) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < phi.values().size(); ++i) {
        const Complex z = phi.values()[i];
        acc += phi.grid().weights()[i] * (z.real() * z.real() + z.imag() * z.imag());
    }
    return acc;
}

/// Weighted-space generator for a kernel K on grid points:
/// A_ij = sqrt(w_i) K_ij sqrt(w_j), so the double quadrature
/// sum_ij w_i w_j conj(phi_i) K_ij phi_j equals <embed(phi)|A|embed(phi)>.
inline HermitianOperator weighted_kernel_operator(const Grid& grid, const Matrix& kernel) {
    if (kernel.rows() != grid.point_count() || kernel.cols() != grid.point_count())
        throw GridMismatchError("weighted_kernel_operator: kernel size mismatch");
    Matrix a(kernel.rows(), kernel.cols());
    for (Eigen::Index i = 0; i < kernel.rows(); ++i)
        for (Eigen::Index j = 0; j < kernel.cols(); ++j)
            a(i, j) = std::sqrt(grid.weights()[i]) * kernel(i, j) *
                      std::sqrt(grid.weights()[j]);
    return HermitianOperator(std::move(a)); // NonHermitianError if K is not
}

/// Diagonal multiplication kernel for a potential V(x): K_ii = V(x_i)/w_i,
/// so the form reduces to sum w_i V(x_i) |phi_i|^2.
inline Matrix multiplication_kernel(const Grid& grid,
                                    const std::function<double(double, double)>& v) {
    Matrix k = Matrix::Zero(grid.point_count(), grid.point_count());
    for (int i = 0; i < grid.point_count(); ++i)
        k(i, i) = v(grid.coordinates()[i][0], grid.coordinates()[i][1]) /
                  grid.weights()[i];
    return k;
}

/// f(phi) = sum_ij w_i w_j conj(phi_i) K_ij phi_j via the weighted
/// embedding; real to form_tol.
inline double kernel_quadratic_form(const Grid& grid, const Matrix& kernel,
                                    const GridField& phi) {
    if (!(grid == phi.grid()))
        throw GridMismatchError("kernel_quadratic_form: grids differ");
    return quadratic_form(QuadraticForm(weighted_kernel_operator(grid, kernel)),
                          phi.embed());
}

/// Random fields with covariance kernel B on the grid: samples the
/// weighted embedding as a plain Gaussian ensemble and unembeds.
inline std::vector<GridField> grid_random_field(const Grid& grid, const Matrix& b_kernel,
                                                std::size_t n, std::uint64_t seed) {
    const HermitianOperator weighted = weighted_kernel_operator(grid, b_kernel);
    const FieldEnsemble ensemble =
        FieldEnsemble::gaussian(CovarianceOperator(weighted.entries()), seed);
    const SampleBatch batch = sample(ensemble, n, seed);
    std::vector<GridField> fields;
    fields.reserve(n);
    for (const auto& s : batch.samples()) {
        Vector v(s.dim());
        for (int i = 0; i < s.dim(); ++i)
            v[i] = s[i] / std::sqrt(grid.weights()[i]);
        fields.emplace_back(grid, std::move(v));
    }
    return fields;
}

} // namespace pcsft
