#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dimkit/experiment.hpp"
#include "dimkit/solvers.hpp"
#include "dimkit/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitConfigError = 2;

dimkit::ExperimentConfig load_config_or_default(const std::string& path) {
    if (path.empty()) {
        return dimkit::default_experiment_config();
    }
    return dimkit::load_experiment_config(path);
}

nlohmann::json morph_result_json(const dimkit::MorphResult& result, int pair_index) {
    nlohmann::json j;
    j["pair_id"] = pair_index;
    j["variant"] = dimkit::variant_name(result.variant);
    j["nfe"] = result.nfe;
    j["x0_ab"] = result.x0_ab;
    if (result.heuristic_value.has_value()) {
        j["heuristic"] = *result.heuristic_value;
    }
    if (result.chosen_blend.has_value()) {
        j["chosen_blend"] = *result.chosen_blend;
    }
    nlohmann::json steps = nlohmann::json::array();
    for (const dimkit::StepRecord& rec : result.per_step) {
        nlohmann::json sj;
        sj["t"] = rec.t;
        if (rec.blend.has_value()) {
            sj["blend"] = *rec.blend;
        }
        if (rec.heuristic.has_value()) {
            sj["heuristic"] = *rec.heuristic;
        }
        steps.push_back(sj);
    }
    j["per_step"] = steps;
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Heuristic-guided diffusion morphing toolkit"};
    app.require_subcommand(1);

    // morph: one pair, one variant
    auto* morph_cmd = app.add_subcommand("morph", "Run a single morph pair");
    std::string morph_config;
    std::string morph_variant = "dim";
    std::string morph_out;
    int morph_pair = 0;
    std::uint64_t morph_seed = 0;
    bool morph_seed_set = false;
    morph_cmd->add_option("--config", morph_config, "Experiment config file (JSON)");
    morph_cmd->add_option("--variant", morph_variant,
                          "dim | morph_pipe | greedy_s | greedy_w | greedy_star");
    morph_cmd->add_option("--pair-index", morph_pair, "Cohort pair index");
    morph_cmd->add_option("--seed", morph_seed, "Override the cohort seed")
        ->each([&](const std::string&) { morph_seed_set = true; });
    morph_cmd->add_option("--out", morph_out, "Write the result JSON here instead of stdout");

    // experiment: full cohort
    auto* exp_cmd = app.add_subcommand("experiment", "Run the full cohort experiment");
    std::string exp_config;
    std::string exp_out_dir;
    std::uint64_t exp_seed = 0;
    bool exp_seed_set = false;
    double exp_fmr = 0.0;
    bool exp_fmr_set = false;
    int exp_jobs = 0;
    exp_cmd->add_option("--config", exp_config, "Experiment config file (JSON)");
    exp_cmd->add_option("--seed", exp_seed, "Override the experiment seed")
        ->each([&](const std::string&) { exp_seed_set = true; });
    exp_cmd->add_option("--jobs", exp_jobs, "Worker threads (default from config)");
    exp_cmd->add_option("--out-dir", exp_out_dir, "Output directory");
    exp_cmd->add_option("--fmr", exp_fmr, "False match rate for threshold calibration")
        ->each([&](const std::string&) { exp_fmr_set = true; });

    // nfe: print accounting
    auto* nfe_cmd = app.add_subcommand("nfe", "Print NFE accounting for a variant");
    std::string nfe_mode = "dim";
    long long nfe_encode = 250;
    long long nfe_sample = 100;
    long long nfe_blends = 0;
    nfe_cmd->add_option("--mode", nfe_mode,
                        "dim | morph_pipe | greedy_s | greedy_star | fast_dim_style");
    nfe_cmd->add_option("--encode-steps", nfe_encode, "N_E");
    nfe_cmd->add_option("--sample-steps", nfe_sample, "N");
    nfe_cmd->add_option("--blends", nfe_blends, "B (morph_pipe only)");

    // verify: property suites
    auto* verify_cmd = app.add_subcommand("verify", "Run the verification suites");
    std::string suite = "all";
    verify_cmd->add_option("--suite", suite,
                           "all | theorem1 | theorem2 | gradients | roundtrip | metrics");

    // metrics: recompute from a CSV
    auto* metrics_cmd = app.add_subcommand("metrics", "Recompute metrics from a score CSV");
    std::string metrics_csv;
    std::string metrics_summary;
    std::vector<double> metrics_deltas;
    metrics_cmd->add_option("--csv", metrics_csv, "scores.csv produced by `experiment`")
        ->required();
    metrics_cmd->add_option("--summary", metrics_summary,
                            "summary.json to take thresholds from");
    metrics_cmd->add_option("--delta", metrics_deltas,
                            "Explicit per-system thresholds (ordered as in the CSV)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help
        }
        app.exit(e);
        return kExitConfigError;
    }

    try {
        if (morph_cmd->parsed()) {
            dimkit::ExperimentConfig cfg = load_config_or_default(morph_config);
            if (morph_seed_set) {
                cfg.seed = morph_seed;
            }
            const dimkit::Variant variant = dimkit::variant_from_name(morph_variant);
            const dimkit::VariantSpec* spec = nullptr;
            for (const dimkit::VariantSpec& s : cfg.variants) {
                if (s.variant == variant) {
                    spec = &s;
                    break;
                }
            }
            if (spec == nullptr) {
                throw std::invalid_argument("variant not present in config: " + morph_variant);
            }
            const dimkit::MorphResult result =
                dimkit::run_single_morph(cfg, *spec, morph_pair);
            const nlohmann::json j = morph_result_json(result, morph_pair);
            if (morph_out.empty()) {
                std::cout << j.dump(2) << '\n';
            } else {
                std::ofstream out(morph_out, std::ios::binary);
                if (!out) {
                    throw std::invalid_argument("cannot write " + morph_out);
                }
                out << j.dump(2) << '\n';
            }
            return kExitOk;
        }

        if (exp_cmd->parsed()) {
            dimkit::ExperimentConfig cfg = load_config_or_default(exp_config);
            if (const char* env = std::getenv("DIMKIT_OUT_DIR")) {
                cfg.out_dir = env;
            }
            if (exp_seed_set) {
                cfg.seed = exp_seed;
            }
            if (exp_fmr_set) {
                cfg.fmr = exp_fmr;
            }
            if (exp_jobs > 0) {
                cfg.jobs = exp_jobs;
            }
            if (!exp_out_dir.empty()) {
                cfg.out_dir = exp_out_dir;
            }
            const dimkit::ExperimentResult result = dimkit::run_experiment(cfg);
            dimkit::write_experiment_outputs(result, cfg.out_dir);
            std::cout << result.summary.dump(2) << '\n';
            return kExitOk;
        }

        if (nfe_cmd->parsed()) {
            dimkit::NfeMode mode;
            if (nfe_mode == "dim") {
                mode = dimkit::NfeMode::dim;
            } else if (nfe_mode == "morph_pipe") {
                mode = dimkit::NfeMode::morph_pipe;
            } else if (nfe_mode == "greedy_s") {
                mode = dimkit::NfeMode::greedy_s;
            } else if (nfe_mode == "greedy_star") {
                mode = dimkit::NfeMode::greedy_star;
            } else if (nfe_mode == "fast_dim_style") {
                mode = dimkit::NfeMode::fast_dim_style;
            } else {
                throw std::invalid_argument("unknown NFE mode: " + nfe_mode);
            }
            const std::optional<long long> blends =
                nfe_blends > 0 ? std::optional<long long>(nfe_blends) : std::nullopt;
            std::cout << dimkit::nfe_accounting(mode, nfe_encode, nfe_sample, blends) << '\n';
            return kExitOk;
        }

        if (verify_cmd->parsed()) {
            const std::vector<dimkit::CheckResult> results = dimkit::verify_suite(suite);
            bool ok = true;
            for (const dimkit::CheckResult& r : results) {
                std::cout << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail
                          << '\n';
                ok = ok && r.passed;
            }
            return ok ? kExitOk : kExitVerifyFailure;
        }

        if (metrics_cmd->parsed()) {
            std::ifstream in(metrics_csv, std::ios::binary);
            if (!in) {
                throw std::invalid_argument("cannot open " + metrics_csv);
            }
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            const dimkit::ParsedCsv parsed = dimkit::parse_csv(text);
            std::vector<double> deltas = metrics_deltas;
            if (deltas.empty()) {
                if (metrics_summary.empty()) {
                    throw std::invalid_argument("need --summary or --delta for thresholds");
                }
                std::ifstream sin(metrics_summary, std::ios::binary);
                if (!sin) {
                    throw std::invalid_argument("cannot open " + metrics_summary);
                }
                nlohmann::json summary;
                sin >> summary;
                for (const std::string& name : parsed.system_names) {
                    deltas.push_back(summary.at("thresholds").at(name).get<double>());
                }
            }
            if (deltas.size() != parsed.system_names.size()) {
                throw std::invalid_argument("threshold count does not match CSV systems");
            }
            const nlohmann::json out =
                dimkit::metrics_from_rows(parsed.rows, parsed.system_names, deltas);
            std::cout << out.dump(2) << '\n';
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    }
    return kExitConfigError;
}
