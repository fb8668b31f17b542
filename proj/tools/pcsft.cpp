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

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pcsft/pcsft.hpp"

namespace {

int log_level() {
    const char* env = std::getenv("PCSFT_LOG");
    if (!env)
        return 1;
    const std::string v(env);
    if (v == "quiet" || v == "0") return 0;
    if (v == "debug" || v == "2") return 2;
    return 1;
}

// The payload file is byte-deterministic for a given (config, seed);
// wall-clock metadata goes to a sidecar only.
void write_output(const std::string& out_path, const std::string& payload) {
    if (out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream os(out_path, std::ios::binary);
    if (!os)
        throw pcsft::Error("cannot open output file: " + out_path);
    os << payload;

    const auto now = std::chrono::system_clock::now().time_since_epoch();
    nlohmann::json meta = {
        {"written_unix_ms",
         std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
    std::ofstream ms(out_path + ".meta.json", std::ios::binary);
    ms << meta.dump(2) << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pcsft: prequantum field / quantum average correspondence lab"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format = "json";
    unsigned workers = 1;
    std::optional<std::uint64_t> seed_override;

    std::uint64_t seed_value = 0;
    for (const char* name : {"verify", "estimate", "audit", "gridfield"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_path, "output path (default: stdout)");
        sub->add_option("--format", format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--workers", workers, "worker thread count");
        sub->add_option("--seed", seed_value, "override config seed");
    }

    CLI11_PARSE(app, argc, argv);
    auto* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    if (sub->count("--seed") > 0)
        seed_override = seed_value;

    try {
        std::ifstream is(config_path);
        if (!is)
            throw pcsft::ConfigError("cannot read config file: " + config_path);
        nlohmann::json config;
        try {
            config = nlohmann::json::parse(is);
        } catch (const nlohmann::json::parse_error& e) {
            throw pcsft::ConfigError(std::string("config parse error: ") + e.what());
        }

        pcsft::experiment::RunOptions opts;
        opts.format = format;
        opts.workers = workers;
        opts.seed_override = seed_override;

        nlohmann::json report;
        const int status = pcsft::experiment::run_command(command, config, opts, report);

        std::string payload;
        if (command == "estimate")
            payload = format == "csv"
                          ? pcsft::experiment::estimate_report_csv(report)
                          : pcsft::experiment::estimate_report_jsonl(report);
        else
            payload = report.dump(2) + "\n";
        write_output(out_path, payload);

        if (log_level() >= 1)
            std::cerr << "pcsft " << command << ": "
                      << (status == 0 ? "ok" : "FAILED") << "\n";
        return status;
    } catch (const pcsft::Error& e) {
        std::cerr << "pcsft " << command << ": invalid input: " << e.what() << "\n";
        return pcsft::experiment::kExitInvalidInput;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "pcsft " << command << ": invalid input: " << e.what() << "\n";
        return pcsft::experiment::kExitInvalidInput;
    }
}
