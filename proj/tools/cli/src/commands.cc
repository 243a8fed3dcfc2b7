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


#include "commands.h"

#include <cmath>

#include "config_io.h"
#include "output.h"
#include "rbcorr/errors.h"
#include "rbcorr/fitting.h"
#include "rbcorr/noise.h"
#include "rbcorr/rb.h"
#include "rbcorr/worst_case.h"

namespace rbcorr::cli {

namespace {

Json load_config(const CommandOptions& opts) {
    if (opts.config.empty()) throw ConfigError("--config is required");
    Json config = read_json_file(opts.config);
    require_object(config, "");
    return config;
}

void require_out(const CommandOptions& opts) {
    if (opts.out.empty()) throw ConfigError("--out is required");
}

std::uint64_t effective_seed(const CommandOptions& opts, const Json& config, const char* key = "seed") {
    if (opts.seed) return *opts.seed;
    if (config.contains(key)) return get_seed(config[key], key);
    return 0;
}

std::size_t effective_threads(const CommandOptions& opts, const Json& config) {
    std::size_t t = 1;
    if (config.contains("threads")) t = get_size(config["threads"], "threads");
    if (opts.threads) t = *opts.threads;
    if (t == 0) throw ConfigError("threads must be >= 1");
    return t;
}

Json doubles(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(x);
    return a;
}

Json doubles(const RealVector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Json complex_list(const std::vector<Complex>& v) {
    Json a = Json::array();
    for (const auto& z : v) a.push_back({z.real(), z.imag()});
    return a;
}

// Reports are JSON; nlohmann prints doubles with the shortest round-trip
// representation, which is at most 17 significant digits.
std::string render_report(const Json& report) { return report.dump(2) + "\n"; }

Json fit_result_json(const FitResult& r) {
    Json j;
    j["order"] = r.order;
    j["exponents"] = doubles(r.exponents);
    j["amplitudes"] = doubles(r.amplitudes);
    j["offset"] = r.offset;
    j["weights"] = doubles(r.weights);
    j["exponent_stderr"] = doubles(r.exponent_stderr);
    j["rmse"] = r.rmse;
    j["adjusted_r2"] = r.adjusted_r2;
    j["condition_number"] = r.condition_number;
    j["rejected_eigenvalues"] = complex_list(r.rejected);
    j["degenerate"] = r.degenerate;
    j["flags"] = r.flags;
    return j;
}

}  // namespace

void cmd_simulate(const CommandOptions& opts) {
    const Json config = load_config(opts);
    require_out(opts);
    check_keys(config, {"seed", "threads", "noise", "spam", "rb"}, "");

    RBConfig rb;
    rb.noise = parse_noise(require_key(config, "noise", ""), "noise");
    rb.spam = config.contains("spam") ? parse_spam(config["spam"], "spam") : ideal_spam(2);
    rb.seed = effective_seed(opts, config);
    rb.threads = effective_threads(opts, config);

    const Json& rbj = require_key(config, "rb", "");
    check_keys(rbj, {"lengths", "sequences", "shots", "randomize_spam", "exact"}, "rb");
    rb.lengths = parse_lengths(require_key(rbj, "lengths", "rb"), "rb.lengths");
    rb.sequences = get_size(require_key(rbj, "sequences", "rb"), "rb.sequences");
    rb.shots = get_size(require_key(rbj, "shots", "rb"), "rb.shots");
    if (rbj.contains("randomize_spam")) rb.randomize_spam = get_bool(rbj["randomize_spam"], "rb.randomize_spam");
    const bool exact = rbj.contains("exact") && get_bool(rbj["exact"], "rb.exact");
    validate_config(rb);

    ASFCurve curve;
    if (exact) {
        // Ensemble average over all Clifford sequences, no sampling.
        for (std::size_t m : rb.lengths) {
            curve.points.push_back(CurvePoint{m, exact_asf(rb.noise, rb.spam, m, rb.randomize_spam), 0.0, 0, 0});
        }
    } else {
        curve = run_rb(rb);
    }

    Provenance prov{"simulate", rb.seed, config_digest(config), {}};
    prov.extra.emplace_back("model_class", model_class(rb.noise));
    prov.extra.emplace_back("model_digest", model_digest(rb.noise));
    prov.extra.emplace_back("mode", exact ? "exact" : "sampled");

    CsvTable table({"m", "mean", "stderr", "k", "shots"});
    for (const auto& p : curve.points) {
        table.add_row({std::to_string(p.m), format_double(p.mean), format_double(p.std_error), std::to_string(p.k),
                       std::to_string(p.shots)});
    }
    write_outputs(opts.out, prov, config, {{opts.out, table.render(prov)}});
}

void cmd_fit(const CommandOptions& opts) {
    require_out(opts);
    if (opts.data.empty()) throw ConfigError("--data is required");
    Json config = opts.config.empty() ? Json::object() : load_config(opts);
    check_keys(config, {"seed", "threads", "convention", "order", "bootstrap", "sigmas"}, "");

    ExponentConvention convention = ExponentConvention::kM;
    if (config.contains("convention")) {
        if (!config["convention"].is_string()) throw ConfigError("convention: expected \"m\" or \"m+1\"");
        convention = parse_convention(config["convention"].get<std::string>());
    }
    EspritOptions eo;
    eo.convention = convention;
    if (config.contains("order")) {
        const Json& o = config["order"];
        if (o.is_string() && o.get<std::string>() == "log_gap") {
            eo.method = OrderMethod::kLogGap;
        } else if (o.is_number_integer()) {
            eo.method = OrderMethod::kManual;
            eo.manual_order = get_size(o, "order");
        } else {
            throw ConfigError("order: expected \"log_gap\" or a positive integer");
        }
    }
    eo.bootstrap = config.contains("bootstrap") ? get_size(config["bootstrap"], "bootstrap") : 0;
    eo.seed = effective_seed(opts, config);
    const double sigmas = config.contains("sigmas") ? get_double(config["sigmas"], "sigmas") : 3.0;

    const std::string text = read_text_file(opts.data);
    const ASFCurve curve = read_curve_csv(text, opts.data);

    const SingleExponentialFit single = fit_single_exponential(curve, convention, eo.bootstrap, eo.seed);

    Provenance prov{"fit", eo.seed, config_digest(config), {}};
    prov.extra.emplace_back("data_digest", fnv1a_hex(text));
    Json report = provenance_json(prov);
    report["convention"] = to_string(convention);
    report["points"] = curve.points.size();

    Json sj;
    sj["amplitude"] = single.amplitude;
    sj["decay"] = single.decay;
    sj["decay_stderr"] = single.decay_stderr;
    sj["offset"] = single.offset;
    sj["rmse"] = single.quality.rmse;
    sj["adjusted_r2"] = single.quality.adjusted_r2;
    sj["iterations"] = single.iterations;
    sj["converged"] = single.converged;
    sj["degenerate"] = single.degenerate;
    report["single_exponential"] = sj;

    Json flags = Json::array();
    if (single.degenerate) flags.push_back("degenerate_fit");

    FitResult witness_source = to_fit_result(single);
    try {
        const FitResult esprit = fit_esprit(curve, eo);
        report["esprit"] = fit_result_json(esprit);
        report["singular_values"] = doubles(esprit.singular_values);
        Json cmp;
        cmp["rmse_single"] = single.quality.rmse;
        cmp["rmse_esprit"] = esprit.rmse;
        cmp["adjusted_r2_single"] = single.quality.adjusted_r2;
        cmp["adjusted_r2_esprit"] = esprit.adjusted_r2;
        cmp["preferred"] = esprit.rmse < single.quality.rmse ? "esprit" : "single_exponential";
        report["comparison"] = cmp;
        witness_source = esprit;
        if (esprit.degenerate && !single.degenerate) flags.push_back("degenerate_fit");
    } catch (const std::invalid_argument& e) {
        report["esprit"] = {{"error", e.what()}};
        report["singular_values"] = doubles(hankel_singular_spectrum(curve));
        flags.push_back("esprit_failed");
    }

    const WitnessVerdict w = memory_witness(witness_source, curve, sigmas);
    Json wj;
    wj["exponent_above_one"] = w.exponent_above_one;
    wj["non_monotone"] = w.non_monotone;
    wj["quantum_memory"] = w.witness;
    wj["max_exponent"] = w.max_exponent;
    wj["increasing_at"] = w.increasing_at;
    wj["reasons"] = w.reasons;
    wj["sigmas"] = sigmas;
    report["witness"] = wj;
    if (w.witness) flags.push_back("quantum_memory_witness");
    report["flags"] = flags;

    write_outputs(opts.out, prov, config, {{opts.out, render_report(report)}});
}

void cmd_blindness(const CommandOptions& opts) {
    const Json config = load_config(opts);
    require_out(opts);
    check_keys(config, {"seed", "threads", "hamiltonian", "tolerance"}, "");
    const Json& hj = require_key(config, "hamiltonian", "");
    if (hj.contains("type") && hj["type"] != "hamiltonian") {
        throw ConfigError("hamiltonian.type: must be \"hamiltonian\" when given");
    }
    const HamiltonianCoupled model = parse_hamiltonian(hj, "hamiltonian");
    const double tol = config.contains("tolerance") ? get_double(config["tolerance"], "tolerance") : 1e-9;
    const BlindnessReport b = blindness_check(model, tol);

    Provenance prov{"blindness", effective_seed(opts, config), config_digest(config), {}};
    prov.extra.emplace_back("model_digest", model_digest(NoiseModel{model}));
    Json report = provenance_json(prov);
    Json spectra = Json::array();
    for (const auto& s : b.spectra) spectra.push_back(doubles(s));
    report["spectra"] = spectra;
    report["cosine_sums"] = doubles(b.cosine_sums);
    report["gaps"] = doubles(b.gaps);
    report["weights"] = doubles(b.weights);
    report["decays"] = doubles(b.decays);
    report["is_blind"] = b.is_blind;
    report["gap_condition"] = b.gap_condition;
    report["tolerance"] = b.tolerance;
    write_outputs(opts.out, prov, config, {{opts.out, render_report(report)}});
}

void cmd_worstcase(const CommandOptions& opts) {
    const Json config = load_config(opts);
    require_out(opts);
    check_keys(config, {"seed", "threads", "lengths", "p_grid", "deltas", "sequences", "cross_check"}, "");

    const std::vector<std::size_t> lengths =
        config.contains("lengths") ? parse_lengths(config["lengths"], "lengths") : std::vector<std::size_t>{4, 8, 16};
    const std::vector<double> p_grid = config.contains("p_grid")
                                           ? parse_grid(config["p_grid"], "p_grid")
                                           : parse_grid(Json{{"start", 0.0}, {"stop", 1.0}, {"points", 11}}, "");
    const std::vector<double> deltas = config.contains("deltas") ? parse_grid(config["deltas"], "deltas")
                                                                 : std::vector<double>{M_PI / 100.0};
    for (double p : p_grid) {
        if (p < 0.0 || p > 1.0) throw ConfigError("p_grid: mixing parameters must lie in [0, 1]");
    }
    for (double d : deltas) {
        if (!(d > 0.0) || d >= M_PI / 2) throw ConfigError("deltas: each delta must lie in (0, pi/2)");
    }

    SweepOptions so;
    so.seed = effective_seed(opts, config);
    so.threads = effective_threads(opts, config);
    so.sequences = config.contains("sequences") ? get_size(config["sequences"], "sequences") : 50;
    so.cross_check = config.contains("cross_check") && get_bool(config["cross_check"], "cross_check");

    std::vector<SweepRow> rows;
    for (double delta : deltas) {
        auto part = mixing_sweep(lengths, p_grid, delta, so);
        rows.insert(rows.end(), part.begin(), part.end());
    }

    Provenance prov{"worstcase", so.seed, config_digest(config), {}};
    CsvTable table({"length", "p", "delta", "mean", "stderr", "sequences", "failures", "max_method_gap", "method"});
    for (const auto& r : rows) {
        table.add_row({std::to_string(r.length), format_double(r.p), format_double(r.delta), format_double(r.mean),
                       format_double(r.std_error), std::to_string(r.sequences), std::to_string(r.failures),
                       format_double(r.max_method_gap), to_string(r.method)});
    }
    std::vector<OutputFile> outputs{{opts.out, table.render(prov)}};

    if (deltas.size() >= 2) {
        // log-log slope of the mean distance against delta, per length and p.
        CsvTable scaling({"length", "p", "slope", "intercept"});
        for (std::size_t m : lengths) {
            std::vector<SweepRow> sub;
            for (const auto& r : rows) {
                if (r.length == m) sub.push_back(r);
            }
            for (const auto& f : delta_scaling_fit(sub)) {
                scaling.add_row({std::to_string(m), format_double(f.p), format_double(f.slope),
                                 format_double(f.intercept)});
            }
        }
        outputs.emplace_back(opts.out + ".scaling.csv", scaling.render(prov));
    }
    write_outputs(opts.out, prov, config, outputs);
}

}  // namespace rbcorr::cli
