#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dimkit/experiment.hpp"

using namespace dimkit;

namespace {

// small cohort / short grids so the suite stays fast
ExperimentConfig tiny_config() {
    ExperimentConfig cfg = default_experiment_config();
    cfg.pairs = 4;
    cfg.encode_steps = 30;
    cfg.variants.clear();
    for (Variant v : {Variant::dim, Variant::greedy_s, Variant::greedy_star}) {
        for (VariantSpec spec : default_experiment_config().variants) {
            if (spec.variant == v) {
                spec.pipeline.encode_steps = 30;
                spec.pipeline.sample_steps = v == Variant::greedy_star ? 10 : 20;
                cfg.variants.push_back(spec);
            }
        }
    }
    return cfg;
}

}  // namespace

TEST_CASE("default config reproduces the reference hyperparameters") {
    const ExperimentConfig cfg = default_experiment_config();
    REQUIRE(cfg.variants.size() == 5);
    const VariantSpec* star = nullptr;
    const VariantSpec* search = nullptr;
    for (const VariantSpec& spec : cfg.variants) {
        if (spec.variant == Variant::greedy_star) star = &spec;
        if (spec.variant == Variant::greedy_s) search = &spec;
    }
    REQUIRE(star != nullptr);
    REQUIRE(search != nullptr);
    CHECK(star->pipeline.sample_steps == 20);
    CHECK(star->pipeline.encode_steps == 250);
    CHECK(star->greedy.n_opt == 50);
    CHECK(star->greedy.lr == 0.01);
    CHECK(star->greedy.beta0 == 0.5);
    CHECK(star->greedy.beta1 == 0.9);
    CHECK(star->greedy.opt_stride == 1);
    CHECK(star->greedy.noise_level == 1.0);
    CHECK(search->pipeline.sample_steps == 100);
    CHECK(search->greedy.blend_count == 21);
    CHECK(cfg.fmr == 0.001);
}

TEST_CASE("config json round trip is faithful") {
    const ExperimentConfig cfg = default_experiment_config();
    const nlohmann::json j = experiment_config_to_json(cfg);
    const ExperimentConfig back = experiment_config_from_json(j);
    CHECK(experiment_config_to_json(back) == j);
}

TEST_CASE("unknown config keys are rejected") {
    nlohmann::json j;
    j["paris"] = 12;  // typo for pairs
    CHECK_THROWS_AS(experiment_config_from_json(j), std::invalid_argument);
    nlohmann::json v;
    v["variants"] = nlohmann::json::array({{{"name", "dim"}, {"blnd", 0.5}}});
    CHECK_THROWS_AS(experiment_config_from_json(v), std::invalid_argument);
}

TEST_CASE("invalid configs are rejected") {
    ExperimentConfig cfg = default_experiment_config();
    cfg.pairs = 0;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg = default_experiment_config();
    cfg.fmr = 1.5;
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
    cfg = default_experiment_config();
    cfg.eval_seeds.clear();
    CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("cohort generation is seeded and pair-stable") {
    const ExperimentConfig cfg = tiny_config();
    const Cohort a = make_cohort(cfg);
    const Cohort b = make_cohort(cfg);
    REQUIRE(a.pairs.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a.pairs[i].x0_a == b.pairs[i].x0_a);
        CHECK(a.pairs[i].x0_b == b.pairs[i].x0_b);
    }
    ExperimentConfig other = cfg;
    other.seed += 1;
    const Cohort c = make_cohort(other);
    CHECK(a.pairs[0].x0_a != c.pairs[0].x0_a);
    CHECK(a.pairs[0].label_a == "p0a");
    CHECK(a.pairs[0].label_b == "p0b");
}

TEST_CASE("experiment runs deterministically and in parallel") {
    ExperimentConfig cfg = tiny_config();
    const ExperimentResult r1 = run_experiment(cfg);
    const ExperimentResult r2 = run_experiment(cfg);
    CHECK(format_csv(r1) == format_csv(r2));
    CHECK(r1.summary.dump() == r2.summary.dump());

    cfg.jobs = 4;
    const ExperimentResult r4 = run_experiment(cfg);
    CHECK(format_csv(r1) == format_csv(r4));
    CHECK(r1.summary.dump() == r4.summary.dump());
}

TEST_CASE("csv rows round-trip through the parser unchanged") {
    const ExperimentResult res = run_experiment(tiny_config());
    const std::string text = format_csv(res);
    const ParsedCsv parsed = parse_csv(text);
    REQUIRE(parsed.system_names == res.system_names);
    REQUIRE(parsed.rows.size() == res.rows.size());
    ExperimentResult rebuilt;
    rebuilt.system_names = parsed.system_names;
    rebuilt.rows = parsed.rows;
    CHECK(format_csv(rebuilt) == text);
}

TEST_CASE("summary metrics agree with a recomputation from the rows") {
    const ExperimentResult res = run_experiment(tiny_config());
    const nlohmann::json again =
        metrics_from_rows(res.rows, res.system_names, res.thresholds);
    CHECK(again == res.summary.at("variants"));
}

TEST_CASE("summary nfe fields match the accounting") {
    const ExperimentResult res = run_experiment(tiny_config());
    const auto& variants = res.summary.at("variants");
    CHECK(variants.at("dim").at("nfe").get<long long>() == 30 + 20);
    CHECK(variants.at("greedy_s").at("nfe").get<long long>() == 30 + 20);
    CHECK(variants.at("greedy_star").at("nfe").get<long long>() == 30 + 10);
}

TEST_CASE("greedy_star dominates every variant at the reference model spread") {
    // the library-default s = 0.05 cohort: the optimizer variant beats all
    // other variants on every evaluation system
    ExperimentConfig cfg = default_experiment_config();
    cfg.data_stddev = 0.05;
    for (VariantSpec& spec : cfg.variants) {
        spec.pipeline.data_stddev = 0.05;
    }
    cfg.jobs = 4;
    const ExperimentResult res = run_experiment(cfg);
    const auto& variants = res.summary.at("variants");
    for (const std::string& system : res.system_names) {
        const double star = variants.at("greedy_star").at("mmpmr").at(system).get<double>();
        for (const char* other : {"greedy_s", "greedy_w", "morph_pipe", "dim"}) {
            CHECK(star >= variants.at(other).at("mmpmr").at(system).get<double>());
        }
    }
}

TEST_CASE("single morph runner guards the pair index") {
    const ExperimentConfig cfg = tiny_config();
    CHECK_THROWS_AS(run_single_morph(cfg, cfg.variants[0], -1), std::invalid_argument);
    CHECK_THROWS_AS(run_single_morph(cfg, cfg.variants[0], 4), std::invalid_argument);
    const MorphResult res = run_single_morph(cfg, cfg.variants[0], 0);
    CHECK(res.nfe == 50);
    CHECK(res.x0_ab.size() == 8);
}

TEST_CASE("csv parser rejects malformed input") {
    CHECK_THROWS_AS(parse_csv(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_csv("a,b,c\n"), std::invalid_argument);
    const std::string good_header = "pair_id,variant,sim_a_x,sim_b_x,heuristic,nfe\n";
    CHECK_THROWS_AS(parse_csv(good_header + "0,dim,0.5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_csv("pair_id,variant,sim_a_x,sim_b_y,heuristic,nfe\n"),
                    std::invalid_argument);
    const ParsedCsv ok = parse_csv(good_header + "0,dim,0.5,0.25,0.125,350\n");
    REQUIRE(ok.rows.size() == 1);
    CHECK(ok.system_names == std::vector<std::string>{"x"});
    CHECK(ok.rows[0].nfe == 350);
}

TEST_CASE("config loading failures surface as configuration errors") {
    CHECK_THROWS_AS(load_experiment_config("/nonexistent/config.json"),
                    std::invalid_argument);
    nlohmann::json bad_variant;
    bad_variant["variants"] = nlohmann::json::array({{{"name", "mystery"}}});
    CHECK_THROWS_AS(experiment_config_from_json(bad_variant), std::invalid_argument);
}

TEST_CASE("format_double uses 17 significant digits") {
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-17) == "-2.4999999999999999e-17");
    CHECK(format_double(0.5) == "0.5");
}
