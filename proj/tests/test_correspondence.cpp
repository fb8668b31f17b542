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

#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace pcsft;
namespace pt = pcsft::testing;

TEST_CASE("map_J examples") {
    // two_point(e1) -> pure state |e1><e1|
    const auto rho1 = map_J(FieldEnsemble::two_point(FieldState::basis(2, 0)));
    Matrix expect1 = Matrix::Zero(2, 2);
    expect1(0, 0) = 1;
    CHECK((rho1.entries() - expect1).norm() == 0.0);

    // gaussian(diag(2,2)) -> maximally mixed
    Matrix b = 2.0 * Matrix::Identity(2, 2);
    const auto rho2 = map_J(FieldEnsemble::gaussian(CovarianceOperator(b)));
    CHECK((rho2.entries() - Matrix::Identity(2, 2) / 2.0).norm() < 1e-15);

    // gaussian([[2,1],[1,2]]) -> divide by Tr B = 4
    Matrix b3(2, 2);
    b3 << Complex(2, 0), Complex(1, 0), Complex(1, 0), Complex(2, 0);
    const auto rho3 = map_J(FieldEnsemble::gaussian(CovarianceOperator(b3)));
    Matrix expect3(2, 2);
    expect3 << Complex(0.5, 0), Complex(0.25, 0), Complex(0.25, 0), Complex(0.5, 0);
    CHECK((rho3.entries() - expect3).norm() < 1e-15);
}

TEST_CASE("map_J rejects the degenerate zero ensemble") {
    const auto p = FieldEnsemble::gaussian(CovarianceOperator(Matrix::Zero(2, 2)));
    CHECK_THROWS_AS(map_J(p), DegenerateEnsembleError);
    CHECK_THROWS_AS(verify_average_correspondence(p, QuadraticForm(HermitianOperator::identity(2))),
                    DegenerateEnsembleError);
    CHECK_THROWS_AS(amplified_variable(QuadraticForm(HermitianOperator::identity(2)), p),
                    DegenerateEnsembleError);
}

TEST_CASE("map_Jstar is the generator, exactly") {
    const auto a = pt::random_hermitian(4, 8);
    const QuadraticForm f(a);
    CHECK((map_Jstar(f).entries() - a.entries()).norm() == 0.0);
    CHECK((map_Jstar(QuadraticForm(HermitianOperator::identity(3))).entries() -
           Matrix::Identity(3, 3))
              .norm() == 0.0);
}

TEST_CASE("reconstruct_generator recovers random Hermitian generators") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const int dim = 2 + static_cast<int>(s % 15);
        const auto a = pt::random_hermitian(dim, s + 1);
        auto eval = [&](const FieldState& phi) {
            return quadratic_form(QuadraticForm(a), phi);
        };
        const auto recon = reconstruct_generator(eval, dim);
        CHECK((recon.entries() - a.entries()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("reconstruct_generator on the identity") {
    auto eval = [](const FieldState& phi) { return field_energy(phi); };
    const auto recon = reconstruct_generator(eval, 3);
    CHECK((recon.entries() - Matrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("reconstruct_generator rejects a quartic") {
    auto eval = [](const FieldState& phi) {
        const double e = field_energy(phi);
        return e * e;
    };
    CHECK_THROWS_AS(reconstruct_generator(eval, 3), NotAQuadraticFormError);
}

TEST_CASE("bild_average_exact examples") {
    // two_point reduces to the form at psi
    const Vector psi = pt::random_state(3, 2);
    const auto a = pt::random_hermitian(3, 5);
    const auto p = FieldEnsemble::two_point(FieldState(psi));
    CHECK(bild_average_exact(p, QuadraticForm(a)) ==
          Catch::Approx(quadratic_form(QuadraticForm(a), FieldState(psi)))
              .epsilon(1e-12));

    // gaussian(I) gives Tr A
    const auto pid = FieldEnsemble::gaussian(CovarianceOperator(Matrix::Identity(3, 3)));
    CHECK(bild_average_exact(pid, QuadraticForm(a)) ==
          Catch::Approx(a.entries().trace().real()).epsilon(1e-12));

    // gaussian(diag(1,2)) against the off-diagonal flip has zero average
    Matrix b = Matrix::Zero(2, 2);
    b(0, 0) = 1;
    b(1, 1) = 2;
    Matrix x(2, 2);
    x << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
    CHECK(bild_average_exact(FieldEnsemble::gaussian(CovarianceOperator(b)),
                             QuadraticForm(HermitianOperator(x))) == 0.0);
}

TEST_CASE("qm_average examples") {
    const auto a = pt::random_hermitian(4, 11);
    const auto rho = DensityOperator(Matrix::Identity(4, 4) / 4.0);
    CHECK(qm_average(rho, a) ==
          Catch::Approx(a.entries().trace().real() / 4.0).epsilon(1e-12));

    Matrix r(2, 2);
    r << Complex(0.5, 0), Complex(0.25, 0), Complex(0.25, 0), Complex(0.5, 0);
    Matrix x(2, 2);
    x << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
    CHECK(qm_average(DensityOperator(r), HermitianOperator(x)) ==
          Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("scaled averages match for 100 random pairs at dim 8") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto p = pt::random_ensemble(8, s);
        const QuadraticForm f(pt::random_hermitian(8, s + 5000));
        const auto r = verify_average_correspondence(p, f);
        CHECK(r.passed);
        CHECK(r.residual < 1e-10 * (1.0 + std::abs(r.rhs)));
    }
}

TEST_CASE("amplified variable carries the scale") {
    // E_p = 2, A = I -> generator I/2
    const auto p = FieldEnsemble::gaussian(
        CovarianceOperator(2.0 * Matrix::Identity(1, 1)));
    const auto g = amplified_variable(QuadraticForm(HermitianOperator::identity(1)), p);
    CHECK((g.generator().entries() - Matrix::Identity(1, 1) / 2.0).norm() == 0.0);

    // averaging identity over random pairs at dim 4
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto pe = pt::random_ensemble(4, s);
        const QuadraticForm f(pt::random_hermitian(4, s + 300));
        const auto amp = amplified_variable(f, pe);
        const double lhs = bild_average_exact(pe, amp);
        const double rhs = qm_average(map_J(pe), map_Jstar(f));
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-10).margin(1e-10));
    }
}

TEST_CASE("J scale invariance") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto b = pt::random_psd(5, s);
        for (double c : {0.5, 1.0, 5.0}) {
            const auto r1 = map_J(FieldEnsemble::gaussian(b));
            const auto r2 = map_J(FieldEnsemble::gaussian(
                CovarianceOperator(c * b.entries())));
            CHECK((r1.entries() - r2.entries()).cwiseAbs().maxCoeff() < 1e-14);
        }
    }
}

TEST_CASE("J surjectivity: constructive preimage round-trips, dims 2-16") {
    for (int dim : {2, 3, 6, 16}) {
        for (std::uint64_t s = 0; s < 5; ++s) {
            const auto rho = pt::random_density(dim, s + dim * 31);
            const double scale = 0.3 + 3.7 * (s + 1);
            const auto p = audit_J_surjective(rho, scale);
            CHECK((map_J(p).entries() - rho.entries()).norm() < 1e-12);
            CHECK(energy_average(p) == Catch::Approx(scale).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(audit_J_surjective(pt::random_density(2, 1), 0.0),
                    InvalidScaleError);
    CHECK_THROWS_AS(audit_J_surjective(pt::random_density(2, 1), -1.0),
                    InvalidScaleError);
}

TEST_CASE("surjectivity preimage of a pure state still samples") {
    const Vector psi = pt::random_state(4, 13);
    const Matrix proj = hermitize(psi * psi.adjoint()).op.entries();
    const auto rho = DensityOperator(proj / proj.trace().real());
    const auto p = audit_J_surjective(rho, 1.0);
    // rank-deficient covariance: eigen clamping must allow sampling
    const auto batch = sample(p, 50, 9);
    CHECK(batch.count() == 50);
}

TEST_CASE("many-to-one witness") {
    // full-rank rho: two gaussians at different scales share the image
    const auto rho = pt::random_density(3, 40);
    const auto w = audit_J_many_to_one(rho);
    CHECK((map_J(w.first).entries() - map_J(w.second).entries()).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK(std::abs(w.fourth_moment_first - w.fourth_moment_second) > 1e-12);

    // rank-one rho: gaussian vs two_point with distinct fourth moments
    Matrix pure = Matrix::Zero(2, 2);
    pure(0, 0) = 1;
    const auto w2 = audit_J_many_to_one(DensityOperator(pure));
    CHECK((map_J(w2.first).entries() - map_J(w2.second).entries()).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK(w2.fourth_moment_first == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(w2.fourth_moment_second == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Jstar image covers all Hermitian operators at finite dim") {
    for (int dim : {2, 5, 16}) {
        const auto a = pt::random_hermitian(dim, dim * 7ULL);
        auto eval = [&](const FieldState& phi) {
            return quadratic_form(QuadraticForm(a), phi);
        };
        CHECK_NOTHROW(reconstruct_generator(eval, dim));
    }
}
