#include "dimkit/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dimkit {

namespace {

// Derivative of slerp(u, v; w) with respect to w, matching interpolate()'s
// lerp fallback for tiny angles.
Vec slerp_dw(const Vec& u, const Vec& v, double w) {
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) {
        throw std::domain_error("slerp undefined for zero vectors");
    }
    const double cos_theta = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
    const double theta = std::acos(cos_theta);
    if (theta < 1e-6) {
        return sub(v, u);
    }
    const double sin_theta = std::sin(theta);
    const double cu = -theta * std::cos((1.0 - w) * theta) / sin_theta;
    const double cv = theta * std::cos(w * theta) / sin_theta;
    Vec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = cu * u[i] + cv * v[i];
    }
    return out;
}

// Advances the sampling state one node, maintaining the multistep history
// when the DPM++ 2M solver is selected.
Vec advance_state(const Vec& x, const Vec& eps, double t, double next,
                  const NoiseSchedule& sched, SolverKind kind,
                  std::vector<X0Prediction>& history) {
    if (kind == SolverKind::ddim) {
        return ddim_step(x, eps, t, next, sched);
    }
    history.push_back({t, x0_from_eps(x, eps, t, sched)});
    if (history.size() > 2) {
        history.erase(history.begin());
    }
    return dpmpp_2m_step(history, x, t, next, sched);
}

}  // namespace

BlendSearchResult discrete_blend_search(const Vec& x_t, const Vec& eps_a, const Vec& eps_b,
                                        double t, const NoiseSchedule& sched,
                                        const Heuristic& heuristic, const BonaFidePair& pair,
                                        const std::vector<double>& blends) {
    if (blends.empty()) {
        throw std::invalid_argument("discrete_blend_search needs candidate blends");
    }
    BlendSearchResult best;
    bool have_best = false;
    for (double w : blends) {
        const Vec eps = interpolate(eps_a, eps_b, w, InterpMode::slerp);
        const Vec x0 = x0_from_eps(x_t, eps, t, sched);
        const double score = heuristic.value(x0, pair.x0_a, pair.x0_b);
        if (!have_best || score < best.heuristic) {
            have_best = true;
            best.w = w;
            best.heuristic = score;
        }
    }
    return best;
}

BlendSearchResult continuous_blend_search(const Vec& x_t, const Vec& eps_a, const Vec& eps_b,
                                          double t, const NoiseSchedule& sched,
                                          const Heuristic& heuristic, const BonaFidePair& pair,
                                          const GreedyConfig& cfg) {
    const double a = sched.alpha(t);
    const double sg = sched.sigma(t);
    double w = 0.5;

    auto score_at = [&](double blend) {
        const Vec eps = interpolate(eps_a, eps_b, blend, InterpMode::slerp);
        const Vec x0 = x0_from_eps(x_t, eps, t, sched);
        return heuristic.value(x0, pair.x0_a, pair.x0_b);
    };

    BlendSearchResult best{w, score_at(w)};
    for (int i = 0; i < cfg.n_opt; ++i) {
        const double score = score_at(w);
        if (score < best.heuristic) {
            best.heuristic = score;
            best.w = w;
        }
        const Vec eps = interpolate(eps_a, eps_b, w, InterpMode::slerp);
        const Vec x0 = x0_from_eps(x_t, eps, t, sched);
        const Vec gx = heuristic.grad_x(x0, pair.x0_a, pair.x0_b);
        // dH/dw through x0 = (x_t - sigma eps(w)) / alpha
        const Vec deps = slerp_dw(eps_a, eps_b, w);
        const double dh_dw = -(sg / a) * dot(gx, deps);
        w = std::clamp(w - cfg.lr * dh_dw, 0.0, 1.0);
    }
    const double final_score = score_at(w);
    if (final_score < best.heuristic) {
        best.heuristic = final_score;
        best.w = w;
    }
    return best;
}

EpsilonOptResult optimize_epsilon(const Vec& x_t, Vec eps, double t,
                                  const NoiseSchedule& sched, const Heuristic& heuristic,
                                  const BonaFidePair& pair, const GreedyConfig& cfg,
                                  std::vector<double>* best_trace) {
    EpsilonOptResult result;
    const Vec x0_init = x0_from_eps(x_t, eps, t, sched);
    result.initial_heuristic = heuristic.value(x0_init, pair.x0_a, pair.x0_b);
    result.heuristic = result.initial_heuristic;
    result.eps = eps;

    RAdamState state = make_radam_state(eps.size(), cfg.lr, cfg.beta0, cfg.beta1);
    for (int i = 0; i < cfg.n_opt; ++i) {
        const Vec x0 = x0_from_eps(x_t, eps, t, sched);
        const double score = heuristic.value(x0, pair.x0_a, pair.x0_b);
        if (score < result.heuristic) {
            result.heuristic = score;
            result.eps = eps;
        }
        if (best_trace != nullptr) {
            best_trace->push_back(result.heuristic);
        }
        const Vec gx = heuristic.grad_x(x0, pair.x0_a, pair.x0_b);
        const Vec geps = heuristic_grad_eps(gx, t, sched);
        radam_step(state, geps, eps);
    }
    return result;
}

MorphResult greedy_dim_s(const BonaFidePair& pair, const Heuristic& heuristic,
                         const GreedyConfig& greedy, const MorphConfig& cfg) {
    if (greedy.search_mode != SearchMode::discrete) {
        throw std::invalid_argument("greedy_dim_s expects search_mode = discrete");
    }
    if (greedy.blend_count < 1) {
        throw std::invalid_argument("greedy_dim_s needs at least one blend");
    }
    const NoiseSchedule sched = cfg.schedule();
    const GaussianIdentityModel model = cfg.make_model();
    const EncodedPair enc = encode_pair(pair, cfg, model, sched);
    Vec x = initial_morph_state(enc, 0.5, cfg);
    const TimeGrid grid = linear_time_grid(cfg.sample_steps, 0.0, sched.horizon(),
                                           GridDirection::descending);
    const std::vector<double> blends = uniform_blends(greedy.blend_count);

    MorphResult result;
    result.variant = Variant::greedy_s;
    std::vector<X0Prediction> history;
    for (std::size_t i = 0; i + 1 < grid.nodes.size(); ++i) {
        const double t = grid.nodes[i];
        const double next = grid.nodes[i + 1];
        const auto [eps_a, eps_b] = model.epsilon_pair(x, enc.z_a, enc.z_b, t, sched);
        const BlendSearchResult chosen =
            discrete_blend_search(x, eps_a, eps_b, t, sched, heuristic, pair, blends);
        result.per_step.push_back({t, chosen.w, chosen.heuristic});
        const Vec eps = interpolate(eps_a, eps_b, chosen.w, InterpMode::slerp);
        x = advance_state(x, eps, t, next, sched, cfg.solver, history);
    }
    result.x0_ab = std::move(x);
    result.heuristic_value = heuristic.value(result.x0_ab, pair.x0_a, pair.x0_b);
    result.nfe = nfe_accounting(NfeMode::greedy_s, cfg.encode_steps, cfg.sample_steps);
    return result;
}

MorphResult greedy_w_continuous(const BonaFidePair& pair, const Heuristic& heuristic,
                                const GreedyConfig& greedy, const MorphConfig& cfg) {
    if (greedy.search_mode != SearchMode::continuous_w) {
        throw std::invalid_argument("greedy_w_continuous expects search_mode = continuous_w");
    }
    const NoiseSchedule sched = cfg.schedule();
    const GaussianIdentityModel model = cfg.make_model();
    const EncodedPair enc = encode_pair(pair, cfg, model, sched);
    Vec x = initial_morph_state(enc, 0.5, cfg);
    const TimeGrid grid = linear_time_grid(cfg.sample_steps, 0.0, sched.horizon(),
                                           GridDirection::descending);

    MorphResult result;
    result.variant = Variant::greedy_w;
    std::vector<X0Prediction> history;
    for (std::size_t i = 0; i + 1 < grid.nodes.size(); ++i) {
        const double t = grid.nodes[i];
        const double next = grid.nodes[i + 1];
        const auto [eps_a, eps_b] = model.epsilon_pair(x, enc.z_a, enc.z_b, t, sched);
        const BlendSearchResult chosen =
            continuous_blend_search(x, eps_a, eps_b, t, sched, heuristic, pair, greedy);
        result.per_step.push_back({t, chosen.w, chosen.heuristic});
        const Vec eps = interpolate(eps_a, eps_b, chosen.w, InterpMode::slerp);
        x = advance_state(x, eps, t, next, sched, cfg.solver, history);
    }
    result.x0_ab = std::move(x);
    result.heuristic_value = heuristic.value(result.x0_ab, pair.x0_a, pair.x0_b);
    result.nfe = nfe_accounting(NfeMode::greedy_s, cfg.encode_steps, cfg.sample_steps);
    return result;
}

MorphResult greedy_dim_star(const BonaFidePair& pair, const Heuristic& heuristic,
                            const GreedyConfig& greedy, const MorphConfig& cfg) {
    if (greedy.search_mode != SearchMode::epsilon_opt) {
        throw std::invalid_argument("greedy_dim_star expects search_mode = epsilon_opt");
    }
    if (greedy.opt_stride < 1) {
        throw std::invalid_argument("opt_stride must be >= 1");
    }
    const NoiseSchedule sched = cfg.schedule();
    const GaussianIdentityModel model = cfg.make_model();
    const EncodedPair enc = encode_pair(pair, cfg, model, sched);
    Vec x = initial_morph_state(enc, 0.5, cfg);
    const Vec z_ab = interpolate(enc.z_a, enc.z_b, 0.5, InterpMode::lerp);
    const TimeGrid full = linear_time_grid(cfg.sample_steps, 0.0, sched.horizon(),
                                           GridDirection::descending);
    const TimeGrid grid = truncate_to_noise_level(full, greedy.noise_level);

    MorphResult result;
    result.variant = Variant::greedy_star;
    std::vector<X0Prediction> history;
    for (std::size_t i = 0; i + 1 < grid.nodes.size(); ++i) {
        const double t = grid.nodes[i];
        const double next = grid.nodes[i + 1];
        Vec eps = model.epsilon(x, z_ab, t, sched);
        StepRecord record{t, std::nullopt, std::nullopt};
        if (greedy.n_opt > 0 && i % static_cast<std::size_t>(greedy.opt_stride) == 0) {
            EpsilonOptResult opt = optimize_epsilon(x, std::move(eps), t, sched, heuristic,
                                                    pair, greedy);
            record.heuristic = opt.heuristic;
            eps = std::move(opt.eps);
        }
        result.per_step.push_back(record);
        x = advance_state(x, eps, t, next, sched, cfg.solver, history);
    }
    result.x0_ab = std::move(x);
    result.heuristic_value = heuristic.value(result.x0_ab, pair.x0_a, pair.x0_b);
    result.nfe = nfe_accounting(NfeMode::greedy_star, cfg.encode_steps, cfg.sample_steps);
    return result;
}

}  // namespace dimkit
