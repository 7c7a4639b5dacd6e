#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dimkit/greedy.hpp"
#include "dimkit/heuristics.hpp"
#include "dimkit/metrics.hpp"
#include "dimkit/morph.hpp"

namespace dimkit {

struct VariantSpec {
    Variant variant = Variant::dim;
    MorphConfig pipeline;
    GreedyConfig greedy;
    double blend = 0.5;  // fixed blend for the unguided pipeline
};

struct ExperimentConfig {
    int dim = 8;
    int pairs = 100;
    // Experiment-level model spread. Larger than the library default so the
    // terminal sampling steps stay data-dominated; at 0.05 the identity
    // encoder makes the twin predictions antipodal and the last steps stamp
    // a conditioning imbalance that inverts the search-variant ordering.
    double data_stddev = 0.2;
    double beta_min = 0.1;
    double beta_max = 20.0;
    int encode_steps = 250;
    std::uint64_t seed = 11;
    double fmr = 0.001;
    // Cohort difficulty: subject b is subject a plus Gaussian noise scaled by
    // a per-pair factor drawn uniformly from this range (similar-pair cohort).
    double pair_noise_min = 0.35;
    double pair_noise_max = 0.65;
    std::uint64_t guidance_seed = 17;
    std::vector<std::uint64_t> eval_seeds = {101, 211, 307};
    HeuristicKind heuristic = HeuristicKind::id_star;
    DistanceKind distance = DistanceKind::cosine;
    std::vector<VariantSpec> variants;
    std::string out_dir = "out";
    int jobs = 1;
};

// The stock five-variant configuration at the reference hyperparameters.
ExperimentConfig default_experiment_config();

ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_experiment_config(const std::string& path);

struct Cohort {
    std::vector<BonaFidePair> pairs;
};

Cohort make_cohort(const ExperimentConfig& cfg);

// Cosine similarity of the embedded points (higher = more alike).
double embedded_similarity(const EmbeddingModel& system, const Vec& x, const Vec& y);

struct PairScore {
    int pair_id = 0;
    std::string variant;
    std::vector<std::array<double, 2>> sims;  // per system: {sim to a, sim to b}
    double heuristic = 0.0;
    long long nfe = 0;
};

struct ExperimentResult {
    std::vector<std::string> system_names;
    std::vector<double> thresholds;
    std::vector<PairScore> rows;
    nlohmann::json summary;
};

// Runs every configured variant over the seeded cohort, calibrates the
// per-system thresholds at the configured FMR, and assembles per-pair rows
// plus the metric summary. Deterministic for a fixed config; pairs may be
// dispatched across cfg.jobs workers, results merge in pair order.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// One pair, one variant (the CLI `morph` subcommand).
MorphResult run_single_morph(const ExperimentConfig& cfg, const VariantSpec& spec,
                             int pair_index);

// Fixed-format float used in all text output: shortest of 17 significant digits.
std::string format_double(double v);

std::string format_csv(const ExperimentResult& res);

struct ParsedCsv {
    std::vector<std::string> system_names;
    std::vector<PairScore> rows;
};
ParsedCsv parse_csv(const std::string& text);

// Recomputes MMPMR / MAP[1, c] per variant from score rows at the given
// thresholds (the `metrics` subcommand).
nlohmann::json metrics_from_rows(const std::vector<PairScore>& rows,
                                 const std::vector<std::string>& system_names,
                                 const std::vector<double>& thresholds);

// Writes scores.csv and summary.json under out_dir.
void write_experiment_outputs(const ExperimentResult& res, const std::string& out_dir);

}  // namespace dimkit
