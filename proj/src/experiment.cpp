#include "dimkit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dimkit {

namespace {

const char* solver_name(SolverKind k) {
    return k == SolverKind::ddim ? "ddim" : "dpmpp_2m";
}

SolverKind solver_from_name(const std::string& name) {
    if (name == "ddim") return SolverKind::ddim;
    if (name == "dpmpp_2m") return SolverKind::dpmpp_2m;
    throw std::invalid_argument("unknown solver: " + name);
}

const char* forward_name(ForwardKind k) {
    return k == ForwardKind::diffae_forward ? "diffae_forward" : "ddim_forward";
}

ForwardKind forward_from_name(const std::string& name) {
    if (name == "diffae_forward") return ForwardKind::diffae_forward;
    if (name == "ddim_forward") return ForwardKind::ddim_forward;
    throw std::invalid_argument("unknown forward solver: " + name);
}

const char* heuristic_name(HeuristicKind k) {
    switch (k) {
        case HeuristicKind::id_star: return "id_star";
        case HeuristicKind::id_part: return "id_part";
        case HeuristicKind::id_diff: return "id_diff";
        case HeuristicKind::worst_case_l2: return "worst_case_l2";
        case HeuristicKind::worst_case_cos: return "worst_case_cos";
        case HeuristicKind::squared_target: return "squared_target";
    }
    return "unknown";
}

HeuristicKind heuristic_from_name(const std::string& name) {
    if (name == "id_star") return HeuristicKind::id_star;
    if (name == "id_part") return HeuristicKind::id_part;
    if (name == "id_diff") return HeuristicKind::id_diff;
    if (name == "worst_case_l2") return HeuristicKind::worst_case_l2;
    if (name == "worst_case_cos") return HeuristicKind::worst_case_cos;
    throw std::invalid_argument("unknown heuristic: " + name);
}

const char* distance_name(DistanceKind k) {
    return k == DistanceKind::cosine ? "cosine" : "l2";
}

DistanceKind distance_from_name(const std::string& name) {
    if (name == "cosine") return DistanceKind::cosine;
    if (name == "l2") return DistanceKind::l2;
    throw std::invalid_argument("unknown distance: " + name);
}

const char* search_mode_name(SearchMode m) {
    switch (m) {
        case SearchMode::discrete: return "discrete";
        case SearchMode::continuous_w: return "continuous_w";
        case SearchMode::epsilon_opt: return "epsilon_opt";
    }
    return "unknown";
}

SearchMode search_mode_from_name(const std::string& name) {
    if (name == "discrete") return SearchMode::discrete;
    if (name == "continuous_w") return SearchMode::continuous_w;
    if (name == "epsilon_opt") return SearchMode::epsilon_opt;
    throw std::invalid_argument("unknown search mode: " + name);
}

void check_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            throw std::invalid_argument("unknown key '" + it.key() + "' in " + where);
        }
    }
}

VariantSpec default_variant_spec(Variant v, const ExperimentConfig& cfg) {
    VariantSpec spec;
    spec.variant = v;
    spec.pipeline.dim = cfg.dim;
    spec.pipeline.data_stddev = cfg.data_stddev;
    spec.pipeline.beta_min = cfg.beta_min;
    spec.pipeline.beta_max = cfg.beta_max;
    spec.pipeline.encode_steps = cfg.encode_steps;
    switch (v) {
        case Variant::dim:
            spec.pipeline.sample_steps = 100;
            break;
        case Variant::morph_pipe:
            spec.pipeline.sample_steps = 100;
            spec.greedy.search_mode = SearchMode::discrete;
            break;
        case Variant::greedy_s:
            spec.pipeline.sample_steps = 100;
            spec.greedy.search_mode = SearchMode::discrete;
            break;
        case Variant::greedy_w:
            spec.pipeline.sample_steps = 100;
            spec.greedy.search_mode = SearchMode::continuous_w;
            break;
        case Variant::greedy_star:
            spec.pipeline.sample_steps = 20;
            spec.greedy.search_mode = SearchMode::epsilon_opt;
            break;
    }
    return spec;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (cfg.pairs < 1) throw std::invalid_argument("pairs must be >= 1");
    if (!(cfg.fmr > 0.0 && cfg.fmr < 1.0)) throw std::invalid_argument("fmr must lie in (0, 1)");
    if (cfg.encode_steps < 2) throw std::invalid_argument("encode_steps must be >= 2");
    if (cfg.eval_seeds.empty()) throw std::invalid_argument("need at least one eval seed");
    if (cfg.variants.empty()) throw std::invalid_argument("need at least one variant");
    if (cfg.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    if (!(cfg.pair_noise_min >= 0.0) || !(cfg.pair_noise_max >= cfg.pair_noise_min)) {
        throw std::invalid_argument("pair noise range must satisfy 0 <= min <= max");
    }
}

BonaFidePair make_pair(const ExperimentConfig& cfg, int index) {
    std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(index)));
    BonaFidePair pair;
    pair.x0_a = gaussian_vec(rng, static_cast<std::size_t>(cfg.dim));
    std::uniform_real_distribution<double> unif(cfg.pair_noise_min, cfg.pair_noise_max);
    const double tau = unif(rng);
    Vec bump = gaussian_vec(rng, static_cast<std::size_t>(cfg.dim));
    pair.x0_b = pair.x0_a;
    axpy(tau, bump, pair.x0_b);
    pair.label_a = "p" + std::to_string(index) + "a";
    pair.label_b = "p" + std::to_string(index) + "b";
    return pair;
}

Heuristic guidance_heuristic(const ExperimentConfig& cfg) {
    return {cfg.heuristic,
            EmbeddingModel::seeded(cfg.dim, cfg.guidance_seed, cfg.distance)};
}

}  // namespace

ExperimentConfig default_experiment_config() {
    ExperimentConfig cfg;
    cfg.variants = {
        default_variant_spec(Variant::dim, cfg),
        default_variant_spec(Variant::morph_pipe, cfg),
        default_variant_spec(Variant::greedy_s, cfg),
        default_variant_spec(Variant::greedy_w, cfg),
        default_variant_spec(Variant::greedy_star, cfg),
    };
    return cfg;
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    check_keys(j,
               {"dim", "pairs", "data_stddev", "beta_min", "beta_max", "encode_steps",
                "seed", "fmr", "pair_noise_min", "pair_noise_max", "guidance_seed",
                "eval_seeds", "heuristic", "distance", "variants", "out_dir", "jobs"},
               "experiment config");
    ExperimentConfig cfg;
    cfg.variants.clear();
    cfg.dim = j.value("dim", cfg.dim);
    cfg.pairs = j.value("pairs", cfg.pairs);
    cfg.data_stddev = j.value("data_stddev", cfg.data_stddev);
    cfg.beta_min = j.value("beta_min", cfg.beta_min);
    cfg.beta_max = j.value("beta_max", cfg.beta_max);
    cfg.encode_steps = j.value("encode_steps", cfg.encode_steps);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.fmr = j.value("fmr", cfg.fmr);
    cfg.pair_noise_min = j.value("pair_noise_min", cfg.pair_noise_min);
    cfg.pair_noise_max = j.value("pair_noise_max", cfg.pair_noise_max);
    cfg.guidance_seed = j.value("guidance_seed", cfg.guidance_seed);
    if (j.contains("eval_seeds")) {
        cfg.eval_seeds = j.at("eval_seeds").get<std::vector<std::uint64_t>>();
    }
    if (j.contains("heuristic")) {
        cfg.heuristic = heuristic_from_name(j.at("heuristic").get<std::string>());
    }
    if (j.contains("distance")) {
        cfg.distance = distance_from_name(j.at("distance").get<std::string>());
    }
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.jobs = j.value("jobs", cfg.jobs);

    if (j.contains("variants")) {
        for (const auto& vj : j.at("variants")) {
            check_keys(vj,
                       {"name", "sample_steps", "solver", "forward_solver", "blend",
                        "random_initial_noise", "n_opt", "lr", "beta0", "beta1",
                        "opt_stride", "noise_level", "blend_count", "search_mode"},
                       "variant spec");
            const Variant v = variant_from_name(vj.at("name").get<std::string>());
            VariantSpec spec = default_variant_spec(v, cfg);
            spec.pipeline.sample_steps = vj.value("sample_steps", spec.pipeline.sample_steps);
            if (vj.contains("solver")) {
                spec.pipeline.solver = solver_from_name(vj.at("solver").get<std::string>());
            }
            if (vj.contains("forward_solver")) {
                spec.pipeline.forward_solver =
                    forward_from_name(vj.at("forward_solver").get<std::string>());
            }
            spec.blend = vj.value("blend", spec.blend);
            spec.pipeline.random_initial_noise =
                vj.value("random_initial_noise", spec.pipeline.random_initial_noise);
            spec.greedy.n_opt = vj.value("n_opt", spec.greedy.n_opt);
            spec.greedy.lr = vj.value("lr", spec.greedy.lr);
            spec.greedy.beta0 = vj.value("beta0", spec.greedy.beta0);
            spec.greedy.beta1 = vj.value("beta1", spec.greedy.beta1);
            spec.greedy.opt_stride = vj.value("opt_stride", spec.greedy.opt_stride);
            spec.greedy.noise_level = vj.value("noise_level", spec.greedy.noise_level);
            spec.greedy.blend_count = vj.value("blend_count", spec.greedy.blend_count);
            if (vj.contains("search_mode")) {
                spec.greedy.search_mode =
                    search_mode_from_name(vj.at("search_mode").get<std::string>());
            }
            cfg.variants.push_back(spec);
        }
    } else {
        cfg.variants = default_experiment_config().variants;
        for (VariantSpec& spec : cfg.variants) {
            spec.pipeline.dim = cfg.dim;
            spec.pipeline.data_stddev = cfg.data_stddev;
            spec.pipeline.beta_min = cfg.beta_min;
            spec.pipeline.beta_max = cfg.beta_max;
            spec.pipeline.encode_steps = cfg.encode_steps;
        }
    }
    validate_config(cfg);
    return cfg;
}

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["dim"] = cfg.dim;
    j["pairs"] = cfg.pairs;
    j["data_stddev"] = cfg.data_stddev;
    j["beta_min"] = cfg.beta_min;
    j["beta_max"] = cfg.beta_max;
    j["encode_steps"] = cfg.encode_steps;
    j["seed"] = cfg.seed;
    j["fmr"] = cfg.fmr;
    j["pair_noise_min"] = cfg.pair_noise_min;
    j["pair_noise_max"] = cfg.pair_noise_max;
    j["guidance_seed"] = cfg.guidance_seed;
    j["eval_seeds"] = cfg.eval_seeds;
    j["heuristic"] = heuristic_name(cfg.heuristic);
    j["distance"] = distance_name(cfg.distance);
    j["out_dir"] = cfg.out_dir;
    j["jobs"] = cfg.jobs;
    nlohmann::json variants = nlohmann::json::array();
    for (const VariantSpec& spec : cfg.variants) {
        nlohmann::json vj;
        vj["name"] = variant_name(spec.variant);
        vj["sample_steps"] = spec.pipeline.sample_steps;
        vj["solver"] = solver_name(spec.pipeline.solver);
        vj["forward_solver"] = forward_name(spec.pipeline.forward_solver);
        vj["blend"] = spec.blend;
        vj["random_initial_noise"] = spec.pipeline.random_initial_noise;
        vj["n_opt"] = spec.greedy.n_opt;
        vj["lr"] = spec.greedy.lr;
        vj["beta0"] = spec.greedy.beta0;
        vj["beta1"] = spec.greedy.beta1;
        vj["opt_stride"] = spec.greedy.opt_stride;
        vj["noise_level"] = spec.greedy.noise_level;
        vj["blend_count"] = spec.greedy.blend_count;
        vj["search_mode"] = search_mode_name(spec.greedy.search_mode);
        variants.push_back(vj);
    }
    j["variants"] = variants;
    return j;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file: " + path);
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& err) {
        throw std::invalid_argument(std::string("config parse error: ") + err.what());
    }
    return experiment_config_from_json(j);
}

Cohort make_cohort(const ExperimentConfig& cfg) {
    Cohort cohort;
    cohort.pairs.reserve(static_cast<std::size_t>(cfg.pairs));
    for (int i = 0; i < cfg.pairs; ++i) {
        cohort.pairs.push_back(make_pair(cfg, i));
    }
    return cohort;
}

double embedded_similarity(const EmbeddingModel& system, const Vec& x, const Vec& y) {
    return 1.0 - cosine_distance(system.embed(x), system.embed(y));
}

MorphResult run_single_morph(const ExperimentConfig& cfg, const VariantSpec& spec,
                             int pair_index) {
    if (pair_index < 0 || pair_index >= cfg.pairs) {
        throw std::invalid_argument("pair index out of range");
    }
    const BonaFidePair pair = make_pair(cfg, pair_index);
    const Heuristic heuristic = guidance_heuristic(cfg);
    VariantSpec run = spec;
    run.pipeline.noise_seed = derive_seed(
        cfg.seed, 0x1000 + static_cast<std::uint64_t>(pair_index) * 8 +
                      static_cast<std::uint64_t>(run.variant));
    switch (run.variant) {
        case Variant::dim:
            return dim_morph(pair, run.blend, run.pipeline);
        case Variant::morph_pipe:
            return morph_pipe(pair, uniform_blends(run.greedy.blend_count), heuristic,
                              run.pipeline);
        case Variant::greedy_s:
            return greedy_dim_s(pair, heuristic, run.greedy, run.pipeline);
        case Variant::greedy_w:
            return greedy_w_continuous(pair, heuristic, run.greedy, run.pipeline);
        case Variant::greedy_star:
            return greedy_dim_star(pair, heuristic, run.greedy, run.pipeline);
    }
    throw std::logic_error("unhandled variant");
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_csv(const ExperimentResult& res) {
    std::ostringstream out;
    out << "pair_id,variant";
    for (const std::string& name : res.system_names) {
        out << ",sim_a_" << name << ",sim_b_" << name;
    }
    out << ",heuristic,nfe\n";
    for (const PairScore& row : res.rows) {
        out << row.pair_id << ',' << row.variant;
        for (const auto& s : row.sims) {
            out << ',' << format_double(s[0]) << ',' << format_double(s[1]);
        }
        out << ',' << format_double(row.heuristic) << ',' << row.nfe << '\n';
    }
    return out.str();
}

ParsedCsv parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("empty CSV");
    }
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string field;
        while (std::getline(hs, field, ',')) {
            header.push_back(field);
        }
    }
    if (header.size() < 4 || header[0] != "pair_id" || header[1] != "variant" ||
        header[header.size() - 2] != "heuristic" || header.back() != "nfe") {
        throw std::invalid_argument("unexpected CSV header");
    }
    ParsedCsv parsed;
    for (std::size_t i = 2; i + 2 < header.size(); i += 2) {
        const std::string& a = header[i];
        const std::string& b = header[i + 1];
        if (a.rfind("sim_a_", 0) != 0 || b.rfind("sim_b_", 0) != 0 ||
            a.substr(6) != b.substr(6)) {
            throw std::invalid_argument("unexpected similarity columns in CSV header");
        }
        parsed.system_names.push_back(a.substr(6));
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) {
            fields.push_back(field);
        }
        if (fields.size() != header.size()) {
            throw std::invalid_argument("CSV row width mismatch");
        }
        PairScore row;
        row.pair_id = std::stoi(fields[0]);
        row.variant = fields[1];
        for (std::size_t s = 0; s < parsed.system_names.size(); ++s) {
            row.sims.push_back({std::stod(fields[2 + 2 * s]), std::stod(fields[3 + 2 * s])});
        }
        row.heuristic = std::stod(fields[fields.size() - 2]);
        row.nfe = std::stoll(fields.back());
        parsed.rows.push_back(std::move(row));
    }
    return parsed;
}

nlohmann::json metrics_from_rows(const std::vector<PairScore>& rows,
                                 const std::vector<std::string>& system_names,
                                 const std::vector<double>& thresholds) {
    if (system_names.size() != thresholds.size()) {
        throw std::invalid_argument("need one threshold per system");
    }
    std::vector<std::string> variants;
    for (const PairScore& row : rows) {
        if (std::find(variants.begin(), variants.end(), row.variant) == variants.end()) {
            variants.push_back(row.variant);
        }
    }
    nlohmann::json out;
    for (const std::string& name : variants) {
        std::vector<SimilarityTable> tables(system_names.size());
        double heuristic_sum = 0.0;
        long long nfe = 0;
        std::size_t count = 0;
        for (const PairScore& row : rows) {
            if (row.variant != name) {
                continue;
            }
            for (std::size_t s = 0; s < system_names.size(); ++s) {
                tables[s].rows.push_back({row.sims[s][0], row.sims[s][1]});
            }
            heuristic_sum += row.heuristic;
            nfe = row.nfe;
            ++count;
        }
        nlohmann::json vj;
        nlohmann::json mm;
        for (std::size_t s = 0; s < system_names.size(); ++s) {
            mm[system_names[s]] = mmpmr(tables[s], thresholds[s]);
        }
        vj["mmpmr"] = mm;
        vj["map"] = map_1c(tables, thresholds);
        vj["mean_heuristic"] = heuristic_sum / static_cast<double>(count);
        vj["nfe"] = nfe;
        out[name] = vj;
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const Cohort cohort = make_cohort(cfg);
    const Heuristic heuristic = guidance_heuristic(cfg);

    std::vector<EmbeddingModel> systems;
    ExperimentResult res;
    for (std::uint64_t s : cfg.eval_seeds) {
        systems.push_back(EmbeddingModel::seeded(cfg.dim, s));
        res.system_names.push_back("eval_" + std::to_string(s));
    }

    // Impostor calibration over every non-mated bona fide comparison.
    for (std::size_t s = 0; s < systems.size(); ++s) {
        std::vector<Vec> embeddings;
        embeddings.reserve(cohort.pairs.size() * 2);
        for (const BonaFidePair& pair : cohort.pairs) {
            embeddings.push_back(systems[s].embed(pair.x0_a));
            embeddings.push_back(systems[s].embed(pair.x0_b));
        }
        std::vector<double> impostor;
        impostor.reserve(embeddings.size() * (embeddings.size() - 1) / 2);
        for (std::size_t i = 0; i < embeddings.size(); ++i) {
            for (std::size_t k = i + 1; k < embeddings.size(); ++k) {
                impostor.push_back(1.0 - cosine_distance(embeddings[i], embeddings[k]));
            }
        }
        res.thresholds.push_back(threshold_at_fmr(std::move(impostor), cfg.fmr));
    }

    // variant-major, pair-minor task list; merged by index so worker
    // scheduling cannot reorder output.
    const std::size_t tasks = cfg.variants.size() * static_cast<std::size_t>(cfg.pairs);
    res.rows.resize(tasks);
    std::atomic<std::size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t task = cursor.fetch_add(1);
            if (task >= tasks) {
                return;
            }
            const std::size_t v = task / static_cast<std::size_t>(cfg.pairs);
            const int pair_index = static_cast<int>(task % static_cast<std::size_t>(cfg.pairs));
            const VariantSpec& spec = cfg.variants[v];
            const MorphResult morph = run_single_morph(cfg, spec, pair_index);
            const BonaFidePair& pair = cohort.pairs[static_cast<std::size_t>(pair_index)];
            PairScore row;
            row.pair_id = pair_index;
            row.variant = variant_name(spec.variant);
            for (const EmbeddingModel& system : systems) {
                row.sims.push_back({embedded_similarity(system, morph.x0_ab, pair.x0_a),
                                    embedded_similarity(system, morph.x0_ab, pair.x0_b)});
            }
            row.heuristic = morph.heuristic_value.has_value()
                                ? *morph.heuristic_value
                                : heuristic.value(morph.x0_ab, pair.x0_a, pair.x0_b);
            row.nfe = morph.nfe;
            res.rows[task] = std::move(row);
        }
    };
    const int jobs = std::min<int>(cfg.jobs, static_cast<int>(tasks));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int i = 0; i < jobs; ++i) {
            pool.emplace_back(worker);
        }
        for (std::thread& th : pool) {
            th.join();
        }
    }

    nlohmann::json summary;
    summary["seed"] = cfg.seed;
    summary["pairs"] = cfg.pairs;
    summary["fmr"] = cfg.fmr;
    summary["systems"] = res.system_names;
    nlohmann::json thresholds;
    for (std::size_t s = 0; s < systems.size(); ++s) {
        thresholds[res.system_names[s]] = res.thresholds[s];
    }
    summary["thresholds"] = thresholds;
    summary["variants"] = metrics_from_rows(res.rows, res.system_names, res.thresholds);
    res.summary = std::move(summary);
    return res;
}

void write_experiment_outputs(const ExperimentResult& res, const std::string& out_dir) {
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory: " + out_dir);
    }
    {
        std::ofstream csv(dir / "scores.csv", std::ios::binary);
        if (!csv) {
            throw std::runtime_error("cannot write scores.csv under " + out_dir);
        }
        csv << format_csv(res);
    }
    {
        std::ofstream js(dir / "summary.json", std::ios::binary);
        if (!js) {
            throw std::runtime_error("cannot write summary.json under " + out_dir);
        }
        js << res.summary.dump(2) << '\n';
    }
}

}  // namespace dimkit
