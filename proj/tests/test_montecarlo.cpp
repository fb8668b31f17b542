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

TEST_CASE("running moments against a two-pass oracle") {
    auto gen = rng::sample_stream(5, 0);
    std::vector<double> xs;
    RunningMoments mom;
    for (int i = 0; i < 1000; ++i) {
        const double x = gen.next_normal_pair().first;
        xs.push_back(x);
        mom.push(x);
    }
    double mean = 0.0;
    for (double x : xs)
        mean += x;
    mean /= xs.size();
    double m2 = 0.0;
    for (double x : xs)
        m2 += (x - mean) * (x - mean);
    CHECK(mom.mean == Catch::Approx(mean).epsilon(1e-12));
    CHECK(mom.m2 == Catch::Approx(m2).epsilon(1e-9));
}

TEST_CASE("merge matches a single accumulation") {
    auto gen = rng::sample_stream(6, 0);
    RunningMoments whole, left, right;
    for (int i = 0; i < 500; ++i) {
        const double x = gen.next_unit();
        whole.push(x);
        (i < 229 ? left : right).push(x);
    }
    const auto merged = RunningMoments::merge(left, right);
    CHECK(merged.count == whole.count);
    CHECK(merged.mean == Catch::Approx(whole.mean).epsilon(1e-13));
    CHECK(merged.m2 == Catch::Approx(whole.m2).epsilon(1e-10));
}

TEST_CASE("two_point ensembles estimate exactly with zero spread") {
    const Vector psi = pt::random_state(3, 3);
    const auto p = FieldEnsemble::two_point(FieldState(psi));
    const QuadraticForm f(pt::random_hermitian(3, 9));
    const auto r = estimate_average(p, f, 16, 4);
    const double expected = quadratic_form(f, FieldState(psi));
    CHECK(r.estimate == Catch::Approx(expected).epsilon(1e-12));
    CHECK(r.std_error <= 1e-12 * (1.0 + std::abs(expected)));
    REQUIRE(r.z_score.has_value());
}

TEST_CASE("minimal batch N = 2 produces a well-formed report") {
    const auto p = pt::random_ensemble(4, 10);
    const QuadraticForm f(pt::random_hermitian(4, 20));
    const auto r = estimate_average(p, f, 2, 1);
    CHECK(r.n == 2);
    CHECK(std::isfinite(r.estimate));
    CHECK(std::isfinite(r.std_error));
    CHECK(r.target.has_value());
    CHECK_THROWS_AS(estimate_average(p, f, 1, 1), EmptyBatchError);
}

TEST_CASE("gaussian estimate has CLT-scale z-scores") {
    Matrix b = Matrix::Zero(2, 2);
    b(0, 0) = 1;
    b(1, 1) = 2;
    const auto p = FieldEnsemble::gaussian(CovarianceOperator(b));
    const QuadraticForm f(HermitianOperator::identity(2));
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto r = estimate_average(p, f, 20000, seed);
        REQUIRE(r.target == 3.0);
        if (r.z_score && std::abs(*r.z_score) < 5.0)
            ++ok;
    }
    CHECK(ok >= 38); // 95% coverage
}

TEST_CASE("estimates are bit-identical across worker counts") {
    const auto p = pt::random_ensemble(6, 33);
    const QuadraticForm f(pt::random_hermitian(6, 44));
    const auto r1 = estimate_average(p, f, 30000, 9, 1);
    const auto r2 = estimate_average(p, f, 30000, 9, 2);
    const auto r8 = estimate_average(p, f, 30000, 9, 8);
    CHECK(r1.estimate == r2.estimate);
    CHECK(r1.estimate == r8.estimate);
    CHECK(r1.std_error == r2.std_error);
    CHECK(r1.std_error == r8.std_error);
}

TEST_CASE("unbiasedness over 100 seeds") {
    const auto b = pt::random_psd(3, 71);
    const auto p = FieldEnsemble::gaussian(b);
    const QuadraticForm f(pt::random_hermitian(3, 72));
    const double target = bild_average_exact(p, f);
    RunningMoments across;
    double typical_se = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto r = estimate_average(p, f, 2000, seed);
        across.push(r.estimate);
        typical_se = r.std_error;
    }
    CHECK(std::abs(across.mean - target) < 4.0 * typical_se / std::sqrt(100.0));
}

TEST_CASE("closed-form gaussian variance matches the empirical variance") {
    const auto b = pt::random_psd(4, 55);
    const auto p = FieldEnsemble::gaussian(b);
    const QuadraticForm f(pt::random_hermitian(4, 56));
    const double var_exact = gaussian_form_variance(b, f);
    const auto r = estimate_average(p, f, 100000, 3);
    // sample variance back from std_error
    const double var_emp = r.std_error * r.std_error * static_cast<double>(r.n);
    // variance-of-variance scale for a heavy quadratic statistic
    const double se_scale = var_exact * std::sqrt(2.0 / static_cast<double>(r.n));
    CHECK(std::abs(var_emp - var_exact) < 5.0 * 10.0 * se_scale);
    // and within a few percent at this N
    CHECK(var_emp == Catch::Approx(var_exact).epsilon(0.2));
}

TEST_CASE("convergence sweep input validation") {
    const auto p = pt::random_ensemble(2, 1);
    const QuadraticForm f(HermitianOperator::identity(2));
    CHECK_THROWS(convergence_sweep(p, f, {10, 100}, 1));
    CHECK_THROWS(convergence_sweep(p, f, {100, 10, 1000}, 1));
}

TEST_CASE("convergence sweep slope is about -1/2") {
    const std::vector<std::size_t> n_list{1000, 10000, 100000};
    const auto b = pt::random_psd(4, 91);
    const auto p = FieldEnsemble::gaussian(b);
    const QuadraticForm f(HermitianOperator::identity(4));
    const double target = bild_average_exact(p, f);

    std::vector<double> mean_abs_err(n_list.size(), 0.0);
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
        const auto reports = convergence_sweep(p, f, n_list, 1234 + rep);
        for (std::size_t i = 0; i < reports.size(); ++i)
            mean_abs_err[i] += std::abs(reports[i].estimate - target) / reps;
    }
    const double slope = loglog_error_slope(n_list, mean_abs_err);
    CHECK(slope == Catch::Approx(-0.5).margin(0.15));
}

TEST_CASE("sweep on a constant-form two_point ensemble has zero error") {
    const Vector psi = pt::random_state(2, 17);
    const auto p = FieldEnsemble::two_point(FieldState(psi));
    const QuadraticForm f(pt::random_hermitian(2, 18));
    const double expected = quadratic_form(f, FieldState(psi));
    const auto reports = convergence_sweep(p, f, {10, 100, 1000}, 5);
    for (const auto& r : reports)
        CHECK(std::abs(r.estimate - expected) <= 1e-12 * (1.0 + std::abs(expected)));
}

TEST_CASE("traceless pairing: slope still -1/2 when the target is zero") {
    Matrix b = Matrix::Zero(2, 2);
    b(0, 0) = 1;
    b(1, 1) = 2;
    Matrix x(2, 2);
    x << Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0);
    const auto p = FieldEnsemble::gaussian(CovarianceOperator(b));
    const QuadraticForm f{HermitianOperator(x)};
    REQUIRE(bild_average_exact(p, f) == 0.0);

    const std::vector<std::size_t> n_list{1000, 10000, 100000};
    std::vector<double> mean_abs_err(n_list.size(), 0.0);
    const int reps = 20;
    for (int rep = 0; rep < reps; ++rep) {
        const auto reports = convergence_sweep(p, f, n_list, 777 + rep);
        for (std::size_t i = 0; i < reports.size(); ++i)
            mean_abs_err[i] += std::abs(reports[i].estimate) / reps;
    }
    const double slope = loglog_error_slope(n_list, mean_abs_err);
    CHECK(slope == Catch::Approx(-0.5).margin(0.15));
}
