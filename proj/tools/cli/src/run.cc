// Copyright 2026 The rbcorr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <ostream>

#include "CLI11.hpp"
#include "commands.h"
#include "config_io.h"
#include "output.h"
#include "rbcorr/errors.h"

namespace rbcorr::cli {

namespace {

enum ExitCode : int {
    kOk = 0,
    kUsage = 2,
    kConfig = 3,
    kIo = 4,
    kSolver = 5,
    kInternal = 70,
};

void report_error(std::ostream& err, const std::string& command, const char* type, const std::string& message) {
    Json rec;
    rec["error"] = {{"command", command}, {"type", type}, {"message", message}};
    err << rec.dump() << "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Randomized benchmarking under correlated noise", kToolName};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    CommandOptions opts;
    std::uint64_t seed = 0;
    std::size_t threads = 1;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", opts.config, "JSON config document");
        if (config_required) c->required();
        sub->add_option("--out", opts.out, "Output file")->required();
        sub->add_option("--seed", seed, "Master seed (overrides the config)");
        sub->add_option("--threads", threads, "Worker count for parallel sections")->check(CLI::PositiveNumber);
    };
    auto* simulate = app.add_subcommand("simulate", "Simulate an RB survival curve");
    add_common(simulate, true);
    auto* fit = app.add_subcommand("fit", "Fit a survival curve (single exponential and ESPRIT)");
    add_common(fit, false);
    fit->add_option("--data", opts.data, "ASF data file written by simulate")->required();
    auto* blindness = app.add_subcommand("blindness", "Check whether RB is blind to a Hamiltonian coupling");
    add_common(blindness, true);
    auto* worstcase = app.add_subcommand("worstcase", "Diamond-distance sweep for mixed conjugate noise");
    add_common(worstcase, true);

    std::string command = "rbcorr";
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        report_error(err, command, "UsageError", e.what());
        return kUsage;
    }

    for (auto* sub : app.get_subcommands()) command = sub->get_name();
    for (auto* sub : app.get_subcommands()) {
        if (sub->count("--seed")) opts.seed = seed;
        if (sub->count("--threads")) opts.threads = threads;
    }

    try {
        if (command == "simulate") cmd_simulate(opts);
        else if (command == "fit") cmd_fit(opts);
        else if (command == "blindness") cmd_blindness(opts);
        else cmd_worstcase(opts);
    } catch (const ConfigError& e) {
        report_error(err, command, "ConfigError", e.what());
        return kConfig;
    } catch (const IoError& e) {
        report_error(err, command, "IoError", e.what());
        return kIo;
    } catch (const OutOfClassError& e) {
        report_error(err, command, "OutOfClassError", e.what());
        return kConfig;
    } catch (const DimensionError& e) {
        report_error(err, command, "DimensionError", e.what());
        return kConfig;
    } catch (const ValidationError& e) {
        report_error(err, command, "ValidationError", e.what());
        return kConfig;
    } catch (const ConvergenceError& e) {
        report_error(err, command, "ConvergenceError", e.what());
        return kSolver;
    } catch (const Json::exception& e) {
        report_error(err, command, "ConfigError", e.what());
        return kConfig;
    } catch (const std::exception& e) {
        report_error(err, command, "InternalError", e.what());
        return kInternal;
    }
    return kOk;
}

}  // namespace rbcorr::cli
