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

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcsft/ensemble.hpp"
#include "pcsft/gridfield.hpp"

namespace pcsft::io {

using nlohmann::json;

// Complex numbers travel as two-element arrays [re, im]; operators as
// row-major nested arrays. Round-trip is bit-exact for doubles
// (nlohmann emits shortest-round-trip decimals).

inline json to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError("complex value must be a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(to_json(v[i]));
    return out;
}

inline Vector vector_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw ConfigError("vector must be a non-empty array");
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = complex_from_json(j[i]);
    return v;
}

inline json to_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(to_json(m(r, c)));
        out.push_back(std::move(row));
    }
    return out;
}

inline Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw ConfigError("matrix must be a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols)
            throw ConfigError("matrix rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                complex_from_json(j[r][c]);
    }
    return m;
}

inline void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                                const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

// Ensemble spec: {"kind": ..., "dim": d, "seed": s} plus a kind-specific
// payload ("covariance", "state", or "components").
inline json ensemble_to_json(const FieldEnsemble& p) {
    json out;
    out["kind"] = p.kind_name();
    out["dim"] = p.dim();
    out["seed"] = p.seed();
    if (const auto* g = std::get_if<GaussianKind>(&p.kind()))
        out["covariance"] = to_json(g->covariance.entries());
    else if (const auto* t = std::get_if<TwoPointKind>(&p.kind()))
        out["state"] = to_json(t->psi.amplitudes());
    else {
        json comps = json::array();
        for (const auto& c : std::get<FiniteMixtureKind>(p.kind()).components)
            comps.push_back({{"weight", c.weight}, {"state", to_json(c.psi.amplitudes())}});
        out["components"] = comps;
    }
    return out;
}

inline FieldEnsemble ensemble_from_json(const json& j) {
    reject_unknown_keys(j, {"kind", "dim", "seed", "covariance", "state", "components"},
                        "ensemble");
    if (!j.contains("kind"))
        throw ConfigError("ensemble: missing 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    const std::uint64_t seed = j.value("seed", std::uint64_t{0});
    auto check_dim = [&](int actual) {
        if (j.contains("dim") && j.at("dim").get<int>() != actual)
            throw ConfigError("ensemble: 'dim' does not match payload");
    };
    if (kind == "gaussian") {
        Matrix b = matrix_from_json(j.at("covariance"));
        check_dim(static_cast<int>(b.rows()));
        return FieldEnsemble::gaussian(CovarianceOperator(std::move(b)), seed);
    }
    if (kind == "two_point") {
        Vector psi = vector_from_json(j.at("state"));
        check_dim(static_cast<int>(psi.size()));
        return FieldEnsemble::two_point(FieldState(std::move(psi)), seed);
    }
    if (kind == "finite_mixture") {
        std::vector<MixtureComponent> comps;
        for (const auto& c : j.at("components")) {
            reject_unknown_keys(c, {"weight", "state"}, "mixture component");
            comps.push_back({c.at("weight").get<double>(),
                             FieldState(vector_from_json(c.at("state")))});
        }
        if (comps.empty())
            throw ConfigError("ensemble: empty component list");
        check_dim(comps.front().psi.dim());
        return FieldEnsemble::finite_mixture(std::move(comps), seed);
    }
    throw ConfigError("ensemble: unknown kind '" + kind + "'");
}

// Grid spec: {"axes": [{"lo", "hi", "points"}], "quadrature": "trapezoid"}.
inline json grid_to_json(const Grid& g) {
    json axes = json::array();
    for (const auto& ax : g.axes())
        axes.push_back({{"lo", ax.lo}, {"hi", ax.hi}, {"points", ax.points}});
    return {{"axes", axes},
            {"quadrature", g.rule() == QuadratureRule::trapezoid ? "trapezoid" : "midpoint"}};
}

inline Grid grid_from_json(const json& j) {
    reject_unknown_keys(j, {"axes", "quadrature"}, "grid");
    std::vector<GridAxis> axes;
    for (const auto& ax : j.at("axes")) {
        reject_unknown_keys(ax, {"lo", "hi", "points"}, "grid axis");
        axes.push_back({ax.at("lo").get<double>(), ax.at("hi").get<double>(),
                        ax.at("points").get<int>()});
    }
    const std::string rule = j.value("quadrature", "trapezoid");
    if (rule != "trapezoid" && rule != "midpoint")
        throw ConfigError("grid: unknown quadrature rule '" + rule + "'");
    return Grid(std::move(axes), rule == "trapezoid" ? QuadratureRule::trapezoid
                                                     : QuadratureRule::midpoint);
}

// Binary batch format: 32-byte header (magic "PCSFTBAT", u32 version,
// u32 dim, u64 N, u64 reserved) followed by little-endian interleaved
// [re, im] doubles, sample-major.
inline constexpr char kBatchMagic[8] = {'P', 'C', 'S', 'F', 'T', 'B', 'A', 'T'};
inline constexpr std::uint32_t kBatchVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "batch format assumes a little-endian host");

inline void write_batch(std::ostream& os, const SampleBatch& batch) {
    os.write(kBatchMagic, 8);
    const std::uint32_t version = kBatchVersion;
    const std::uint32_t dim = static_cast<std::uint32_t>(batch.dim());
    const std::uint64_t n = batch.count();
    const std::uint64_t reserved = 0;
    os.write(reinterpret_cast<const char*>(&version), 4);
    os.write(reinterpret_cast<const char*>(&dim), 4);
    os.write(reinterpret_cast<const char*>(&n), 8);
    os.write(reinterpret_cast<const char*>(&reserved), 8);
    for (const auto& s : batch.samples())
        for (int j = 0; j < s.dim(); ++j) {
            const double re = s[j].real();
            const double im = s[j].imag();
            os.write(reinterpret_cast<const char*>(&re), 8);
            os.write(reinterpret_cast<const char*>(&im), 8);
        }
}

inline SampleBatch read_batch(std::istream& is, SeedProvenance provenance = {}) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kBatchMagic, 8) != 0)
        throw Error("read_batch: bad magic");
    std::uint32_t version = 0, dim = 0;
    std::uint64_t n = 0, reserved = 0;
    is.read(reinterpret_cast<char*>(&version), 4);
    is.read(reinterpret_cast<char*>(&dim), 4);
    is.read(reinterpret_cast<char*>(&n), 8);
    is.read(reinterpret_cast<char*>(&reserved), 8);
    if (!is || version != kBatchVersion || dim == 0 || n == 0)
        throw Error("read_batch: bad header");
    std::vector<FieldState> samples;
    samples.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Vector v(dim);
        for (std::uint32_t j = 0; j < dim; ++j) {
            double re, im;
            is.read(reinterpret_cast<char*>(&re), 8);
            is.read(reinterpret_cast<char*>(&im), 8);
            v[j] = Complex(re, im);
        }
        if (!is)
            throw Error("read_batch: truncated payload");
        samples.emplace_back(std::move(v));
    }
    return SampleBatch(std::move(samples), std::move(provenance));
}

} // namespace pcsft::io
