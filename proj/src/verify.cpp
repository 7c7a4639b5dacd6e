#include "dimkit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dimkit/greedy.hpp"
#include "dimkit/heuristics.hpp"
#include "dimkit/metrics.hpp"
#include "dimkit/morph.hpp"
#include "dimkit/solvers.hpp"
#include "dimkit/toymodel.hpp"

namespace dimkit {

namespace {

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

double max_abs_diff(const Vec& a, const Vec& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

// H evaluated with one coordinate of x displaced.
double fd_probe(const Heuristic& h, Vec x, std::size_t i, double delta, const Vec& a,
                const Vec& b) {
    x[i] += delta;
    return h.value(x, a, b);
}

double relative_grad_error(const Heuristic& h, const Vec& x, const Vec& a, const Vec& b) {
    const Vec grad = h.grad_x(x, a, b);
    Vec fd(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double step = 1e-6 * std::max(1.0, std::abs(x[i]));
        fd[i] = (fd_probe(h, x, i, step, a, b) - fd_probe(h, x, i, -step, a, b)) / (2.0 * step);
    }
    const double scale = std::max(norm(fd), 1e-8);
    return dist(grad, fd) / scale;
}

}  // namespace

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& r) { return r.passed; });
}

std::vector<CheckResult> verify_theorem1(int probes, double tol, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> beta_lo(0.05, 0.5);
    std::uniform_real_distribution<double> beta_hi(5.0, 25.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        const NoiseSchedule sched(beta_lo(rng), beta_hi(rng));
        const double t = 0.05 + 0.95 * unif(rng);
        const double s = 0.01 + (t - 0.02) * unif(rng);
        const Vec x_t = gaussian_vec(rng, 8);
        const Vec x0 = gaussian_vec(rng, 8);
        const Vec eps_t = eps_from_x0(x_t, x0, t, sched);
        const Vec x_s = ddim_step(x_t, eps_t, t, s, sched);
        const Vec eps_s = eps_from_x0(x_s, x0, s, sched);
        worst = std::max(worst, max_abs_diff(eps_s, eps_t));
    }
    CheckResult check;
    check.name = "theorem1.eps_invariance";
    check.passed = worst < tol;
    check.detail = "max |eps_s - eps_t| = " + fmt(worst) + " over " + std::to_string(probes) +
                   " probes (tol " + fmt(tol) + ")";
    return {check};
}

std::vector<CheckResult> verify_theorem2() {
    // Delta-concentrated model: every blend of the twin predictions keeps the
    // x0 prediction pinned to the z_a..z_b arc, so a target pushed off that
    // arc is unreachable for the discrete search but not for the optimizer.
    MorphConfig cfg;
    cfg.dim = 8;
    cfg.data_stddev = 0.0;
    cfg.sample_steps = 20;
    BonaFidePair pair;
    pair.x0_a = {1.5, 0.5, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0};
    pair.x0_b = {0.5, 1.5, -0.3, 0.0, 0.0, 0.0, 0.0, 0.0};
    Vec target = {1.0, 1.0, 0.0, 0.05, 0.0, 0.0, 0.0, 0.0};
    const Heuristic h = Heuristic::toward_target(target);

    GreedyConfig star_cfg;
    star_cfg.search_mode = SearchMode::epsilon_opt;
    const MorphResult star = greedy_dim_star(pair, h, star_cfg, cfg);
    const double star_gap = dist(star.x0_ab, target);

    GreedyConfig search_cfg;
    search_cfg.search_mode = SearchMode::discrete;
    search_cfg.blend_count = 21;
    const MorphResult searched = greedy_dim_s(pair, h, search_cfg, cfg);
    const double search_gap = dist(searched.x0_ab, target);

    std::vector<CheckResult> checks;
    {
        CheckResult c;
        c.name = "theorem2.optimizer_reaches_target";
        c.passed = star_gap < 1e-2;
        c.detail = "|x0_ab - x*| = " + fmt(star_gap) + " (tol 1e-2)";
        checks.push_back(c);
    }
    {
        CheckResult c;
        c.name = "theorem2.discrete_search_gap";
        c.passed = search_gap > 10.0 * star_gap;
        c.detail = "discrete gap " + fmt(search_gap) + " vs optimized gap " + fmt(star_gap);
        checks.push_back(c);
    }
    return checks;
}

std::vector<CheckResult> verify_gradients(int probes, double tol, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CheckResult> checks;

    struct Case {
        std::string name;
        HeuristicKind kind;
        DistanceKind distance;
    };
    const std::vector<Case> cases = {
        {"id_star/cosine", HeuristicKind::id_star, DistanceKind::cosine},
        {"id_part/cosine", HeuristicKind::id_part, DistanceKind::cosine},
        {"id_diff/cosine", HeuristicKind::id_diff, DistanceKind::cosine},
        {"id_star/l2", HeuristicKind::id_star, DistanceKind::l2},
        {"worst_case_l2", HeuristicKind::worst_case_l2, DistanceKind::l2},
        {"worst_case_cos", HeuristicKind::worst_case_cos, DistanceKind::cosine},
    };
    for (const Case& c : cases) {
        const Heuristic h(c.kind, EmbeddingModel::seeded(8, 99, c.distance));
        double worst = 0.0;
        for (int p = 0; p < probes; ++p) {
            const Vec x = gaussian_vec(rng, 8);
            const Vec a = gaussian_vec(rng, 8);
            const Vec b = gaussian_vec(rng, 8);
            worst = std::max(worst, relative_grad_error(h, x, a, b));
        }
        CheckResult check;
        check.name = "gradients." + c.name;
        check.passed = worst < tol;
        check.detail = "max relative error " + fmt(worst) + " over " + std::to_string(probes) +
                       " probes";
        checks.push_back(check);
    }

    // chain through the x0 prediction into noise-prediction space
    {
        const Heuristic h(HeuristicKind::id_star, EmbeddingModel::seeded(8, 99));
        const NoiseSchedule sched = make_vp_schedule();
        std::uniform_real_distribution<double> tdist(0.1, 0.95);
        double worst = 0.0;
        for (int p = 0; p < probes; ++p) {
            const double t = tdist(rng);
            const Vec x_t = gaussian_vec(rng, 8);
            Vec eps = gaussian_vec(rng, 8);
            const Vec a = gaussian_vec(rng, 8);
            const Vec b = gaussian_vec(rng, 8);
            const Vec x0 = x0_from_eps(x_t, eps, t, sched);
            const Vec grad = heuristic_grad_eps(h.grad_x(x0, a, b), t, sched);
            Vec fd(eps.size());
            for (std::size_t i = 0; i < eps.size(); ++i) {
                const double step = 1e-6 * std::max(1.0, std::abs(eps[i]));
                Vec hi = eps;
                hi[i] += step;
                Vec lo = eps;
                lo[i] -= step;
                fd[i] = (h.value(x0_from_eps(x_t, hi, t, sched), a, b) -
                         h.value(x0_from_eps(x_t, lo, t, sched), a, b)) /
                        (2.0 * step);
            }
            const double scale = std::max(norm(fd), 1e-8);
            worst = std::max(worst, dist(grad, fd) / scale);
        }
        CheckResult check;
        check.name = "gradients.eps_chain";
        check.passed = worst < tol;
        check.detail = "max relative error " + fmt(worst) + " over " + std::to_string(probes) +
                       " probes";
        checks.push_back(check);
    }
    return checks;
}

std::vector<CheckResult> verify_roundtrip() {
    std::vector<CheckResult> checks;
    std::mt19937_64 rng(404);

    {
        // encode then decode at N = 100 with the s = 0.05 model, conditioned
        // the way the pipeline always is: z = encode_semantic(x0) = x0
        const NoiseSchedule sched = make_vp_schedule();
        const GaussianIdentityModel model(0.05, 8);
        const Vec x0 = gaussian_vec(rng, 8);
        const Vec z = encode_semantic(x0);
        const TimeGrid up = linear_time_grid(100, 0.0, 1.0, GridDirection::ascending);
        const TimeGrid down = linear_time_grid(100, 0.0, 1.0, GridDirection::descending);
        const SolveResult enc = encode_forward(model, x0, z, up, sched, ForwardKind::diffae_forward);
        const SolveResult dec = solve_pf_ode(model, enc.state, z, down, sched, SolverKind::ddim);
        const double err = dist(dec.state, x0);
        CheckResult c;
        c.name = "roundtrip.encode_decode_n100";
        c.passed = err < 1e-3;
        c.detail = "|x0_hat - x0| = " + fmt(err) + " (tol 1e-3)";
        checks.push_back(c);
    }
    {
        // exact inversion for the delta-concentrated model away from t = 0
        const NoiseSchedule sched = make_vp_schedule();
        const GaussianIdentityModel model(0.0, 8);
        const Vec z = gaussian_vec(rng, 8);
        const Vec x0 = gaussian_vec(rng, 8);
        const TimeGrid up = linear_time_grid(64, 1e-3, 1.0, GridDirection::ascending);
        const TimeGrid down = linear_time_grid(64, 1e-3, 1.0, GridDirection::descending);
        const SolveResult enc = encode_forward(model, x0, z, up, sched, ForwardKind::diffae_forward);
        const SolveResult dec = solve_pf_ode(model, enc.state, z, down, sched, SolverKind::ddim);
        const double err = dist(dec.state, x0);
        CheckResult c;
        c.name = "roundtrip.s0_exact_inverse";
        c.passed = err < 1e-9;
        c.detail = "|x0_hat - x0| = " + fmt(err) + " (tol 1e-9)";
        checks.push_back(c);
    }
    {
        // DPM++ 2M degenerates to DDIM when the data prediction is constant
        const NoiseSchedule sched = make_vp_schedule();
        const GaussianIdentityModel model(0.0, 8);
        const Vec z = gaussian_vec(rng, 8);
        const Vec x_T = gaussian_vec(rng, 8);
        const TimeGrid down = linear_time_grid(20, 0.0, 1.0, GridDirection::descending);
        const SolveResult ddim = solve_pf_ode(model, x_T, z, down, sched, SolverKind::ddim);
        const SolveResult dpm = solve_pf_ode(model, x_T, z, down, sched, SolverKind::dpmpp_2m);
        const double err = max_abs_diff(ddim.state, dpm.state);
        CheckResult c;
        c.name = "roundtrip.dpmpp_matches_ddim_s0";
        c.passed = err < 1e-9;
        c.detail = "max solver difference " + fmt(err) + " (tol 1e-9)";
        checks.push_back(c);
    }
    {
        // step-halving convergence orders against the exact linear flow
        const NoiseSchedule sched = make_vp_schedule();
        const double s = 1.0;
        const GaussianIdentityModel model(s, 8);
        const Vec z = gaussian_vec(rng, 8);
        const Vec x_T = gaussian_vec(rng, 8);
        const double t_min = 0.1;
        const double t_max = 1.0;
        // Exact PF-ODE flow for the Gaussian model: the normalized deviation
        // u = (x_t - alpha_t z) / sqrt(alpha_t^2 s^2 + sigma_t^2) is constant.
        auto exact_at = [&](double t) {
            const double a_T = sched.alpha(t_max);
            const double sg_T = sched.sigma(t_max);
            const double v_T = a_T * a_T * s * s + sg_T * sg_T;
            const double a = sched.alpha(t);
            const double sg = sched.sigma(t);
            const double v = a * a * s * s + sg * sg;
            Vec out(x_T.size());
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double u = (x_T[i] - a_T * z[i]) / std::sqrt(v_T);
                out[i] = a * z[i] + std::sqrt(v) * u;
            }
            return out;
        };
        const Vec exact = exact_at(t_min);
        auto error_at = [&](int n, SolverKind kind) {
            const TimeGrid grid = linear_time_grid(n, t_min, t_max, GridDirection::descending);
            const SolveResult res = solve_pf_ode(model, x_T, z, grid, sched, kind);
            return dist(res.state, exact);
        };
        const double d40 = error_at(40, SolverKind::ddim);
        const double d80 = error_at(80, SolverKind::ddim);
        const double d160 = error_at(160, SolverKind::ddim);
        const double m40 = error_at(40, SolverKind::dpmpp_2m);
        const double m80 = error_at(80, SolverKind::dpmpp_2m);
        const double m160 = error_at(160, SolverKind::dpmpp_2m);
        const double ddim_order = 0.5 * (std::log2(d40 / d80) + std::log2(d80 / d160));
        const double dpm_order = 0.5 * (std::log2(m40 / m80) + std::log2(m80 / m160));
        CheckResult c;
        c.name = "roundtrip.step_halving_orders";
        c.passed = dpm_order > 1.7 && ddim_order < 1.3 && ddim_order > 0.7 && m160 < d160;
        c.detail = "ddim order " + fmt(ddim_order) + ", dpmpp_2m order " + fmt(dpm_order) +
                   ", errors at N=160: " + fmt(d160) + " vs " + fmt(m160);
        checks.push_back(c);
    }
    return checks;
}

std::vector<CheckResult> verify_metrics(int tables, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> msize(1, 12);
    std::uniform_int_distribution<int> syscount(1, 4);

    bool mmpmr_ok = true;
    bool map_ok = true;
    bool threshold_ok = true;
    bool transfer_ok = true;
    std::string failure;

    for (int iter = 0; iter < tables && failure.empty(); ++iter) {
        const int morphs = msize(rng);
        const int systems = syscount(rng);
        std::vector<SimilarityTable> tabs(static_cast<std::size_t>(systems));
        std::vector<double> deltas(static_cast<std::size_t>(systems));
        for (int s = 0; s < systems; ++s) {
            deltas[static_cast<std::size_t>(s)] = unif(rng);
            auto& rows = tabs[static_cast<std::size_t>(s)].rows;
            rows.resize(static_cast<std::size_t>(morphs));
            for (auto& row : rows) {
                row = {unif(rng), unif(rng)};
            }
        }

        // brute-force mmpmr on the first system
        {
            std::size_t hits = 0;
            for (const auto& row : tabs[0].rows) {
                hits += (std::min(row[0], row[1]) > deltas[0]) ? 1 : 0;
            }
            const double expect = static_cast<double>(hits) / static_cast<double>(morphs);
            if (mmpmr(tabs[0], deltas[0]) != expect) {
                mmpmr_ok = false;
                failure = "mmpmr mismatch";
            }
            // monotone in delta
            const double lower = deltas[0] * 0.5;
            if (mmpmr(tabs[0], lower) < mmpmr(tabs[0], deltas[0])) {
                mmpmr_ok = false;
                failure = "mmpmr not monotone in delta";
            }
        }

        // brute-force MAP
        {
            const std::vector<double> got = map_1c(tabs, deltas);
            for (int c = 1; c <= systems; ++c) {
                std::size_t hits = 0;
                for (int m = 0; m < morphs; ++m) {
                    int fooled = 0;
                    for (int s = 0; s < systems; ++s) {
                        const auto& row = tabs[static_cast<std::size_t>(s)]
                                              .rows[static_cast<std::size_t>(m)];
                        fooled += (std::min(row[0], row[1]) > deltas[static_cast<std::size_t>(s)])
                                      ? 1
                                      : 0;
                    }
                    hits += (fooled >= c) ? 1 : 0;
                }
                const double expect = static_cast<double>(hits) / static_cast<double>(morphs);
                if (got[static_cast<std::size_t>(c - 1)] != expect) {
                    map_ok = false;
                    failure = "map mismatch";
                }
                if (c > 1 && got[static_cast<std::size_t>(c - 1)] >
                                 got[static_cast<std::size_t>(c - 2)]) {
                    map_ok = false;
                    failure = "map not monotone in c";
                }
            }
            for (int s = 0; s < systems; ++s) {
                if (got[0] < mmpmr(tabs[static_cast<std::size_t>(s)],
                                   deltas[static_cast<std::size_t>(s)])) {
                    map_ok = false;
                    failure = "map[1] below a single-system mmpmr";
                }
            }
        }

        // threshold calibration against a scan over all sample values
        {
            std::uniform_int_distribution<int> nscores(1, 40);
            std::uniform_int_distribution<int> coarse(0, 9);
            const int n = nscores(rng);
            std::vector<double> scores(static_cast<std::size_t>(n));
            const bool discretize = unif(rng) < 0.5;
            for (double& v : scores) {
                v = discretize ? coarse(rng) / 10.0 : unif(rng);
            }
            const double fmr = 0.01 + 0.5 * unif(rng);
            const double got = threshold_at_fmr(scores, fmr);
            std::vector<double> sorted = scores;
            std::sort(sorted.begin(), sorted.end());
            double expect = sorted.back();
            for (double candidate : sorted) {
                std::size_t above = 0;
                for (double v : sorted) {
                    above += (v > candidate) ? 1 : 0;
                }
                if (static_cast<double>(above) / static_cast<double>(n) <= fmr) {
                    expect = candidate;
                    break;
                }
            }
            std::size_t above_at_got = 0;
            for (double v : sorted) {
                above_at_got += (v > got) ? 1 : 0;
            }
            if (got != expect ||
                static_cast<double>(above_at_got) / static_cast<double>(n) > fmr) {
                threshold_ok = false;
                failure = "threshold_at_fmr mismatch";
            }
        }

        // transferability / rsm
        {
            std::uniform_int_distribution<int> len(1, 16);
            const int n = len(rng);
            std::vector<bool> on_alpha(static_cast<std::size_t>(n));
            std::vector<bool> on_beta(static_cast<std::size_t>(n));
            bool any_alpha = false;
            for (int i = 0; i < n; ++i) {
                on_alpha[static_cast<std::size_t>(i)] = unif(rng) < 0.6;
                on_beta[static_cast<std::size_t>(i)] = unif(rng) < 0.6;
                any_alpha = any_alpha || on_alpha[static_cast<std::size_t>(i)];
            }
            if (!any_alpha) {
                on_alpha[0] = true;
            }
            std::size_t det = 0;
            std::size_t both = 0;
            for (int i = 0; i < n; ++i) {
                if (on_alpha[static_cast<std::size_t>(i)]) {
                    ++det;
                    both += on_beta[static_cast<std::size_t>(i)] ? 1 : 0;
                }
            }
            const double expect = static_cast<double>(both) / static_cast<double>(det);
            if (transferability(on_alpha, on_beta) != expect) {
                transfer_ok = false;
                failure = "transferability mismatch";
            }
            const double t_ab = 0.1 + 0.9 * unif(rng);
            const double t_ba = 0.1 + 0.9 * unif(rng);
            if (std::abs(rsm(t_ab, t_ba) + rsm(t_ba, t_ab)) > 1e-12) {
                transfer_ok = false;
                failure = "rsm not antisymmetric";
            }
        }
    }

    std::vector<CheckResult> checks;
    auto push = [&](const std::string& name, bool ok) {
        CheckResult c;
        c.name = name;
        c.passed = ok;
        c.detail = ok ? std::to_string(tables) + " random tables" : failure;
        checks.push_back(c);
    };
    push("metrics.mmpmr_oracle", mmpmr_ok);
    push("metrics.map_oracle", map_ok);
    push("metrics.threshold_oracle", threshold_ok);
    push("metrics.transferability_oracle", transfer_ok);
    return checks;
}

std::vector<CheckResult> verify_suite(const std::string& selector) {
    std::vector<CheckResult> out;
    auto append = [&](std::vector<CheckResult> part) {
        for (CheckResult& c : part) {
            out.push_back(std::move(c));
        }
    };
    const bool all = selector == "all" || selector.empty();
    bool known = all;
    if (all || selector == "theorem1") {
        append(verify_theorem1());
        known = true;
    }
    if (all || selector == "theorem2") {
        append(verify_theorem2());
        known = true;
    }
    if (all || selector == "gradients") {
        append(verify_gradients());
        known = true;
    }
    if (all || selector == "roundtrip") {
        append(verify_roundtrip());
        known = true;
    }
    if (all || selector == "metrics") {
        append(verify_metrics());
        known = true;
    }
    if (!known) {
        throw std::invalid_argument("unknown verify selector: " + selector);
    }
    return out;
}

}  // namespace dimkit
