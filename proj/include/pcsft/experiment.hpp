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
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pcsft/correspondence.hpp"
#include "pcsft/io.hpp"
#include "pcsft/montecarlo.hpp"

namespace pcsft::experiment {

using io::json;

// Exit-code contract: 0 success, 1 a mathematical identity or
// statistical gate failed, 2 invalid input.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifiedFalse = 1;
inline constexpr int kExitInvalidInput = 2;

struct RunOptions {
    std::string format = "json"; // "json" or "csv"
    unsigned workers = 1;
    std::optional<std::uint64_t> seed_override;
};

namespace detail {

/// E_p without going through the assembled covariance matrix, so the
/// energy-trace check compares two genuinely different routes for the discrete
/// kinds.
inline double energy_direct(const FieldEnsemble& p) {
    if (const auto* g = std::get_if<GaussianKind>(&p.kind()))
        return g->covariance.trace();
    if (const auto* t = std::get_if<TwoPointKind>(&p.kind()))
        return field_energy(t->psi);
    double acc = 0.0;
    for (const auto& c : std::get<FiniteMixtureKind>(p.kind()).components)
        acc += c.weight * field_energy(c.psi);
    return acc;
}

inline QuadraticForm form_from_json(const json& j) {
    io::reject_unknown_keys(j, {"generator"}, "form");
    return QuadraticForm(HermitianOperator(io::matrix_from_json(j.at("generator"))));
}

inline double frobenius(const Matrix& m) { return m.norm(); }

inline json match_report_to_json(const AverageMatchReport& r, const FieldEnsemble& p,
                                 std::uint64_t seed) {
    return {{"lhs", r.lhs},     {"rhs", r.rhs},       {"residual", r.residual},
            {"energy", r.energy}, {"dims", r.dim},    {"ensemble_spec", io::ensemble_to_json(p)},
            {"seed", seed},       {"passed", r.passed}};
}

inline std::uint64_t resolve_seed(const json& config, const RunOptions& opts) {
    if (opts.seed_override)
        return *opts.seed_override;
    return config.value("seed", std::uint64_t{0});
}

} // namespace detail

/// verify: checks the scaled-average identity and the energy-trace
/// identity for each (ensemble, form) pair.
inline int cmd_verify(const json& config, const RunOptions& opts, json& report) {
    io::reject_unknown_keys(config, {"pairs", "seed", "tolerances"}, "verify config");
    const std::uint64_t seed = detail::resolve_seed(config, opts);
    double residual_tol = kResidualTol;
    double energy_tol = kTraceTol;
    if (config.contains("tolerances")) {
        io::reject_unknown_keys(config.at("tolerances"), {"residual", "energy"},
                                "verify tolerances");
        residual_tol = config.at("tolerances").value("residual", kResidualTol);
        energy_tol = config.at("tolerances").value("energy", kTraceTol);
    }
    if (!config.contains("pairs") || !config.at("pairs").is_array() ||
        config.at("pairs").empty())
        throw ConfigError("verify: 'pairs' must be a non-empty array");

    bool all_passed = true;
    json results = json::array();
    for (const auto& pair : config.at("pairs")) {
        io::reject_unknown_keys(pair, {"ensemble", "form"}, "verify pair");
        const FieldEnsemble p = io::ensemble_from_json(pair.at("ensemble"));
        const QuadraticForm f = detail::form_from_json(pair.at("form"));
        const AverageMatchReport r = verify_average_correspondence(p, f, residual_tol);
        json entry = detail::match_report_to_json(r, p, seed);
        const double e_direct = detail::energy_direct(p);
        const double e_trace = energy_average(p);
        const double e_residual = std::abs(e_direct - e_trace);
        const bool e_passed = e_residual <= energy_tol * std::max(1.0, std::abs(e_trace));
        entry["energy_check"] = {{"lhs", e_direct},
                                 {"rhs", e_trace},
                                 {"residual", e_residual},
                                 {"passed", e_passed}};
        all_passed = all_passed && r.passed && e_passed;
        results.push_back(std::move(entry));
    }
    report = {{"command", "verify"},
              {"rng", std::string(kRngId)},
              {"seed", seed},
              {"tolerances", {{"residual", residual_tol}, {"energy", energy_tol}}},
              {"results", results},
              {"passed", all_passed}};
    return all_passed ? kExitOk : kExitVerifiedFalse;
}

namespace detail {

inline json estimate_to_json(const EstimateReport& r) {
    json out = {{"N", r.n},
                {"estimate", r.estimate},
                {"std_error", r.std_error},
                {"rng", r.provenance.rng_id},
                {"seed", r.provenance.master_seed}};
    if (r.target)
        out["target"] = *r.target;
    if (r.z_score)
        out["z"] = *r.z_score;
    return out;
}

} // namespace detail

/// estimate: Monte Carlo estimation of <f>_p, single N or a convergence
/// sweep over N_list.
inline int cmd_estimate(const json& config, const RunOptions& opts, json& report) {
    io::reject_unknown_keys(config,
                            {"ensemble", "form", "N", "N_list", "seed", "z_threshold"},
                            "estimate config");
    const std::uint64_t seed = detail::resolve_seed(config, opts);
    const FieldEnsemble p = io::ensemble_from_json(config.at("ensemble"));
    const QuadraticForm f = detail::form_from_json(config.at("form"));
    const double z_threshold = config.value("z_threshold", 5.0);
    if (config.contains("N") == config.contains("N_list"))
        throw ConfigError("estimate: exactly one of 'N' or 'N_list' required");

    std::vector<EstimateReport> reports;
    if (config.contains("N")) {
        const std::size_t n = config.at("N").get<std::size_t>();
        if (n < 2)
            throw ConfigError("estimate: N must be >= 2");
        reports.push_back(estimate_average(p, f, n, seed, opts.workers));
    } else {
        std::vector<std::size_t> n_list =
            config.at("N_list").get<std::vector<std::size_t>>();
        if (n_list.size() < 3)
            throw ConfigError("estimate: N_list needs at least 3 entries");
        reports = convergence_sweep(p, f, n_list, seed, opts.workers);
    }

    bool all_passed = true;
    json lines = json::array();
    for (const auto& r : reports) {
        const bool ok = r.z_score.has_value() && std::abs(*r.z_score) < z_threshold;
        all_passed = all_passed && ok;
        lines.push_back(detail::estimate_to_json(r));
    }
    report = {{"command", "estimate"},
              {"rng", std::string(kRngId)},
              {"seed", seed},
              {"z_threshold", z_threshold},
              {"ensemble_spec", io::ensemble_to_json(p)},
              {"results", lines},
              {"passed", all_passed}};
    return all_passed ? kExitOk : kExitVerifiedFalse;
}

/// audit: J surjectivity round trips and many-to-one witnesses for a
/// list of density operators.
inline int cmd_audit(const json& config, const RunOptions& opts, json& report) {
    io::reject_unknown_keys(config, {"densities", "scale", "seed", "tolerances"},
                            "audit config");
    const std::uint64_t seed = detail::resolve_seed(config, opts);
    const double scale = config.value("scale", 1.0);
    if (scale <= 0.0)
        throw ConfigError("audit: scale must be positive");
    double roundtrip_tol = 1e-12;
    if (config.contains("tolerances")) {
        io::reject_unknown_keys(config.at("tolerances"), {"roundtrip"}, "audit tolerances");
        roundtrip_tol = config.at("tolerances").value("roundtrip", 1e-12);
    }
    if (!config.contains("densities") || !config.at("densities").is_array() ||
        config.at("densities").empty())
        throw ConfigError("audit: 'densities' must be a non-empty array");

    bool all_passed = true;
    json results = json::array();
    for (const auto& dj : config.at("densities")) {
        const DensityOperator rho(io::matrix_from_json(dj));
        const FieldEnsemble preimage = audit_J_surjective(rho, scale, seed);
        const DensityOperator image = map_J(preimage);
        const double roundtrip_err = detail::frobenius(image.entries() - rho.entries());
        const ManyToOneWitness w = audit_J_many_to_one(rho, seed);
        const double image_gap = detail::frobenius(map_J(w.first).entries() -
                                                   map_J(w.second).entries());
        const double e1 = energy_average(w.first);
        const double e2 = energy_average(w.second);
        const bool distinct = std::abs(e1 - e2) > 1e-12 ||
                              std::abs(w.fourth_moment_first - w.fourth_moment_second) >
                                  1e-12;
        const bool ok = roundtrip_err < roundtrip_tol && image_gap < 1e-12 && distinct;
        all_passed = all_passed && ok;
        results.push_back({{"dim", rho.dim()},
                           {"roundtrip_error", roundtrip_err},
                           {"energy", energy_average(preimage)},
                           {"witness",
                            {{"first", io::ensemble_to_json(w.first)},
                             {"second", io::ensemble_to_json(w.second)},
                             {"image_gap", image_gap},
                             {"fourth_moment_first", w.fourth_moment_first},
                             {"fourth_moment_second", w.fourth_moment_second}}},
                           {"passed", ok}});
    }
    report = {{"command", "audit"},
              {"rng", std::string(kRngId)},
              {"seed", seed},
              {"scale", scale},
              {"roundtrip_tol", roundtrip_tol},
              {"results", results},
              {"passed", all_passed}};
    return all_passed ? kExitOk : kExitVerifiedFalse;
}

namespace detail {

inline GridField gaussian_ground_state(const Grid& grid) {
    return GridField::from_function(grid, [](double x, double) {
        return Complex(std::pow(1.0 / std::numbers::pi, 0.25) * std::exp(-x * x / 2.0),
                       0.0);
    });
}

} // namespace detail

/// gridfield: quadrature fidelity checks on the discretized L2 space —
/// the normalized Gaussian demo, the <x^2> kernel form, a trapezoid
/// refinement-order sweep, and an optional white-noise sampling check.
inline int cmd_gridfield(const json& config, const RunOptions& opts, json& report) {
    io::reject_unknown_keys(config,
                            {"grid", "refinement_points", "seed", "tolerances",
                             "sample_check"},
                            "gridfield config");
    const std::uint64_t seed = detail::resolve_seed(config, opts);
    const Grid grid = io::grid_from_json(config.at("grid"));
    if (grid.spatial_dim() != 1)
        throw ConfigError("gridfield: demo checks require a 1-d grid");
    double energy_tol = 1e-6, xsq_tol = 1e-5, min_order = 1.8;
    if (config.contains("tolerances")) {
        io::reject_unknown_keys(config.at("tolerances"), {"energy", "xsq", "order"},
                                "gridfield tolerances");
        energy_tol = config.at("tolerances").value("energy", 1e-6);
        xsq_tol = config.at("tolerances").value("xsq", 1e-5);
        min_order = config.at("tolerances").value("order", 1.8);
    }

    const GridField phi = detail::gaussian_ground_state(grid);
    const double energy = grid_field_energy(phi);
    const bool energy_ok = std::abs(energy - 1.0) <= energy_tol;

    const Matrix xsq_kernel =
        multiplication_kernel(grid, [](double x, double) { return x * x; });
    const double xsq = kernel_quadratic_form(grid, xsq_kernel, phi);
    const bool xsq_ok = std::abs(xsq - 0.5) <= xsq_tol;

    // Refinement probe: |phi|^2 = e^x on the first axis, whose trapezoid
    // error is genuinely second order (no boundary-derivative
    // cancellation), unlike the rapidly decaying Gaussian.
    json refinement = json::array();
    bool order_ok = true;
    double observed_order = 0.0;
    if (config.contains("refinement_points")) {
        const auto pts = config.at("refinement_points").get<std::vector<int>>();
        if (pts.size() < 2)
            throw ConfigError("gridfield: refinement_points needs >= 2 entries");
        const GridAxis base = grid.axes()[0];
        const double exact = std::exp(base.hi) - std::exp(base.lo);
        std::vector<double> log_h, log_err;
        for (int p : pts) {
            Grid fine({{base.lo, base.hi, p}}, grid.rule());
            GridField probe = GridField::from_function(
                fine, [](double x, double) { return Complex(std::exp(x / 2.0), 0.0); });
            const double err = std::abs(grid_field_energy(probe) - exact);
            const double h = (base.hi - base.lo) / (p - 1);
            refinement.push_back({{"points", p}, {"h", h}, {"error", err}});
            log_h.push_back(std::log(h));
            log_err.push_back(std::log(std::max(err, 1e-300)));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(log_h.size());
        for (std::size_t i = 0; i < log_h.size(); ++i) {
            sx += log_h[i];
            sy += log_err[i];
            sxx += log_h[i] * log_h[i];
            sxy += log_h[i] * log_err[i];
        }
        observed_order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        order_ok = observed_order >= min_order;
    }

    json sample_result;
    bool sample_ok = true;
    if (config.contains("sample_check")) {
        io::reject_unknown_keys(config.at("sample_check"), {"N", "variance"},
                                "gridfield sample_check");
        const std::size_t n = config.at("sample_check").at("N").get<std::size_t>();
        const double variance = config.at("sample_check").value("variance", 1.0);
        // White-noise kernel: independent per-point values with
        // E|phi_i|^2 = variance / w_i, so the weighted embedding has
        // identity-scaled covariance.
        Matrix kernel = Matrix::Zero(grid.point_count(), grid.point_count());
        for (int i = 0; i < grid.point_count(); ++i)
            kernel(i, i) = variance / grid.weights()[i];
        const auto fields = grid_random_field(grid, kernel, n, seed);
        double worst_z = 0.0;
        for (int i = 0; i < grid.point_count(); ++i) {
            RunningMoments mom;
            for (const auto& fld : fields) {
                const Complex z = fld.values()[i];
                mom.push(grid.weights()[i] *
                         (z.real() * z.real() + z.imag() * z.imag()));
            }
            const double se = mom.std_error();
            if (se > 0.0)
                worst_z = std::max(worst_z, std::abs(mom.mean - variance) / se);
        }
        sample_ok = worst_z < 5.0;
        sample_result = {{"N", n}, {"worst_z", worst_z}, {"passed", sample_ok}};
    }

    const bool all_passed = energy_ok && xsq_ok && order_ok && sample_ok;
    report = {{"command", "gridfield"},
              {"rng", std::string(kRngId)},
              {"seed", seed},
              {"grid", io::grid_to_json(grid)},
              {"energy", {{"value", energy}, {"target", 1.0}, {"passed", energy_ok}}},
              {"xsq_form", {{"value", xsq}, {"target", 0.5}, {"passed", xsq_ok}}},
              {"refinement",
               {{"table", refinement}, {"observed_order", observed_order}, {"passed", order_ok}}},
              {"passed", all_passed}};
    if (!sample_result.is_null())
        report["sample_check"] = sample_result;
    return all_passed ? kExitOk : kExitVerifiedFalse;
}

/// Renders an estimate report as JSON lines: a provenance header line
/// followed by one report object per line.
inline std::string estimate_report_jsonl(const json& report) {
    std::ostringstream os;
    os << json{{"command", "estimate"},
               {"rng", report.at("rng")},
               {"seed", report.at("seed")},
               {"z_threshold", report.at("z_threshold")},
               {"ensemble_spec", report.at("ensemble_spec")},
               {"passed", report.at("passed")}}
              .dump()
       << '\n';
    for (const auto& r : report.at("results"))
        os << r.dump() << '\n';
    return os.str();
}

/// Renders an estimate report as CSV with columns (N, estimate,
/// std_error, target, z).
inline std::string estimate_report_csv(const json& report) {
    std::ostringstream os;
    os.precision(17);
    os << "N,estimate,std_error,target,z\n";
    for (const auto& r : report.at("results")) {
        os << r.at("N").get<std::uint64_t>() << ',' << r.at("estimate").get<double>()
           << ',' << r.at("std_error").get<double>() << ',';
        if (r.contains("target"))
            os << r.at("target").get<double>();
        os << ',';
        if (r.contains("z"))
            os << r.at("z").get<double>();
        os << '\n';
    }
    return os.str();
}

/// Dispatches a subcommand. Throws ConfigError (and other pcsft errors)
/// on invalid input; the CLI maps those to exit code 2.
inline int run_command(const std::string& command, const json& config,
                       const RunOptions& opts, json& report) {
    if (command == "verify")
        return cmd_verify(config, opts, report);
    if (command == "estimate")
        return cmd_estimate(config, opts, report);
    if (command == "audit")
        return cmd_audit(config, opts, report);
    if (command == "gridfield")
        return cmd_gridfield(config, opts, report);
    throw ConfigError("unknown command '" + command + "'");
}

} // namespace pcsft::experiment
