// Acceptance harness: runs every headline criterion at its pinned tolerance
// and prints one PASS/FAIL line each. Nonzero exit when anything fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dimkit/experiment.hpp"
#include "dimkit/optim.hpp"
#include "dimkit/solvers.hpp"
#include "dimkit/verify.hpp"

namespace {

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<std::pair<bool, std::string>()> run;
};

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::pair<bool, std::string> fold(const std::vector<dimkit::CheckResult>& checks) {
    bool ok = true;
    std::string detail;
    for (const dimkit::CheckResult& c : checks) {
        ok = ok && c.passed;
        if (!detail.empty()) {
            detail += "; ";
        }
        detail += c.name + (c.passed ? " ok" : " FAILED (" + c.detail + ")");
    }
    return {ok, detail};
}

std::pair<bool, std::string> check_nfe_table() {
    using dimkit::NfeMode;
    bool ok = true;
    ok = ok && dimkit::nfe_accounting(NfeMode::dim, 250, 100) == 350;
    ok = ok && dimkit::nfe_accounting(NfeMode::morph_pipe, 250, 100, 21) == 2350;
    ok = ok && dimkit::nfe_accounting(NfeMode::greedy_s, 250, 100) == 350;
    ok = ok && dimkit::nfe_accounting(NfeMode::greedy_star, 250, 20) == 270;
    // sampling-step relationships: 100 for the unguided pipeline, 21 * 100
    // candidate steps for the brute-force search, 20 for the optimizer
    ok = ok && 21LL * 100LL == 2100LL;
    ok = ok && dimkit::nfe_accounting(NfeMode::morph_pipe, 0, 100, 21) == 2100;
    ok = ok && dimkit::nfe_accounting(NfeMode::dim, 0, 100) == 100;
    ok = ok && dimkit::nfe_accounting(NfeMode::greedy_star, 0, 20) == 20;
    return {ok, "350 / 2350 / 350 / 270 and 100 / 2100 / 20 sampling steps"};
}

std::pair<bool, std::string> check_radam_fixture() {
    dimkit::RAdamState st = dimkit::make_radam_state(1, 0.01, 0.5, 0.9);
    dimkit::Vec p = {0.0};
    // rho_1 = 1 <= 4: momentum branch with m_hat = 1 on the first step
    const bool branch_ok = dimkit::radam_rho(1, 0.9) <= 4.0;
    dimkit::radam_step(st, {1.0}, p);
    const bool s1 = std::abs(p[0] - (-0.01)) < 1e-12;
    dimkit::radam_step(st, {0.5}, p);
    const bool s2 = std::abs(p[0] - (-1.0 / 60.0)) < 1e-12;
    dimkit::radam_step(st, {0.25}, p);
    const bool s3 = std::abs(p[0] - (-11.0 / 525.0)) < 1e-12;
    std::ostringstream detail;
    detail << "trace -0.01, -1/60, -11/525; rho_1 = " << dimkit::radam_rho(1, 0.9);
    return {branch_ok && s1 && s2 && s3, detail.str()};
}

struct OrderingOutcome {
    bool ordered = true;
    std::string detail;
    dimkit::ExperimentResult result;
};

OrderingOutcome run_ordering(const dimkit::ExperimentConfig& cfg) {
    OrderingOutcome out;
    out.result = dimkit::run_experiment(cfg);
    const auto& variants = out.result.summary.at("variants");
    std::ostringstream detail;
    for (const std::string& system : out.result.system_names) {
        const double star = variants.at("greedy_star").at("mmpmr").at(system).get<double>();
        const double search = variants.at("greedy_s").at("mmpmr").at(system).get<double>();
        const double dim = variants.at("dim").at("mmpmr").at(system).get<double>();
        out.ordered = out.ordered && star >= search && search >= dim;
        detail << system << ": " << star << " >= " << search << " >= " << dim << "  ";
    }
    out.detail = detail.str();
    return out;
}

}  // namespace

int main() {
    std::vector<Criterion> criteria;

    criteria.push_back({"nfe_accounting_table", 1.0, check_nfe_table});

    criteria.push_back({"theorem1_eps_invariance", 10.0, []() {
        return fold(dimkit::verify_theorem1(1000, 1e-9, 101));
    }});

    criteria.push_back({"theorem2_off_trajectory_optimum", 60.0, []() {
        return fold(dimkit::verify_theorem2());
    }});

    criteria.push_back({"gradient_correctness", 30.0, []() {
        return fold(dimkit::verify_gradients(100, 1e-5, 202));
    }});

    criteria.push_back({"solver_fidelity", 60.0, []() {
        return fold(dimkit::verify_roundtrip());
    }});

    criteria.push_back({"radam_oracle", 1.0, check_radam_fixture});

    criteria.push_back({"metric_oracles", 30.0, []() {
        return fold(dimkit::verify_metrics(1000, 303));
    }});

    criteria.push_back({"variant_ordering", 300.0, []() {
        const OrderingOutcome out = run_ordering(dimkit::default_experiment_config());
        return std::pair<bool, std::string>(out.ordered, out.detail);
    }});

    criteria.push_back({"experiment_determinism", 300.0, []() {
        dimkit::ExperimentConfig cfg = dimkit::default_experiment_config();
        const std::filesystem::path base = std::filesystem::temp_directory_path();
        const std::filesystem::path dir_a = base / "dimkit_acceptance_a";
        const std::filesystem::path dir_b = base / "dimkit_acceptance_b";
        cfg.jobs = 1;
        const dimkit::ExperimentResult r1 = dimkit::run_experiment(cfg);
        dimkit::write_experiment_outputs(r1, dir_a.string());
        cfg.jobs = 3;  // scheduling must not leak into the outputs
        const dimkit::ExperimentResult r2 = dimkit::run_experiment(cfg);
        dimkit::write_experiment_outputs(r2, dir_b.string());
        const bool csv_same =
            read_file(dir_a / "scores.csv") == read_file(dir_b / "scores.csv");
        const bool json_same =
            read_file(dir_a / "summary.json") == read_file(dir_b / "summary.json");
        std::filesystem::remove_all(dir_a);
        std::filesystem::remove_all(dir_b);
        return std::pair<bool, std::string>(
            csv_same && json_same,
            std::string("scores.csv ") + (csv_same ? "identical" : "DIFFER") +
                ", summary.json " + (json_same ? "identical" : "DIFFER"));
    }});

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::pair<bool, std::string> outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = seconds < c.budget_seconds;
        const bool ok = outcome.first && in_budget;
        failures += ok ? 0 : 1;
        std::printf("[%s] %s (%.2fs / %.0fs budget): %s\n", ok ? "PASS" : "FAIL",
                    c.name.c_str(), seconds, c.budget_seconds, outcome.second.c_str());
    }
    return failures == 0 ? 0 : 1;
}
