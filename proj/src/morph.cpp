#include "dimkit/morph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dimkit {

Vec interpolate(const Vec& u, const Vec& v, double gamma, InterpMode mode) {
    if (u.size() != v.size()) {
        throw std::invalid_argument("interpolate: dimension mismatch");
    }
    if (mode == InterpMode::lerp) {
        Vec out(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) {
            out[i] = (1.0 - gamma) * u[i] + gamma * v[i];
        }
        return out;
    }
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) {
        throw std::domain_error("slerp undefined for zero vectors");
    }
    const double cos_theta = std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
    const double theta = std::acos(cos_theta);
    if (theta < 1e-6) {
        return interpolate(u, v, gamma, InterpMode::lerp);
    }
    const double sin_theta = std::sin(theta);
    const double cu = std::sin((1.0 - gamma) * theta) / sin_theta;
    const double cv = std::sin(gamma * theta) / sin_theta;
    Vec out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = cu * u[i] + cv * v[i];
    }
    return out;
}

std::vector<double> uniform_blends(int count) {
    if (count < 1) {
        throw std::invalid_argument("blend count must be >= 1");
    }
    if (count == 1) {
        return {0.5};
    }
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = static_cast<double>(i) / static_cast<double>(count - 1);
    }
    return out;
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::dim: return "dim";
        case Variant::morph_pipe: return "morph_pipe";
        case Variant::greedy_s: return "greedy_s";
        case Variant::greedy_w: return "greedy_w";
        case Variant::greedy_star: return "greedy_star";
    }
    return "unknown";
}

Variant variant_from_name(const std::string& name) {
    if (name == "dim") return Variant::dim;
    if (name == "morph_pipe") return Variant::morph_pipe;
    if (name == "greedy_s") return Variant::greedy_s;
    if (name == "greedy_w") return Variant::greedy_w;
    if (name == "greedy_star") return Variant::greedy_star;
    throw std::invalid_argument("unknown variant: " + name);
}

EncodedPair encode_pair(const BonaFidePair& pair, const MorphConfig& cfg,
                        const GaussianIdentityModel& model, const NoiseSchedule& sched) {
    if (pair.x0_a.size() != pair.x0_b.size()) {
        throw std::invalid_argument("bona fide pair dimensions differ");
    }
    EncodedPair enc;
    enc.z_a = encode_semantic(pair.x0_a);
    enc.z_b = encode_semantic(pair.x0_b);
    const TimeGrid grid = linear_time_grid(cfg.encode_steps, 0.0, sched.horizon(),
                                           GridDirection::ascending);
    Vec x_a = pair.x0_a;
    Vec x_b = pair.x0_b;
    for (std::size_t i = 0; i + 1 < grid.nodes.size(); ++i) {
        const double t = grid.nodes[i];
        const double next = grid.nodes[i + 1];
        const double eval_t =
            cfg.forward_solver == ForwardKind::diffae_forward ? t : next;
        const auto eps = model.epsilon_batch({x_a, x_b}, {enc.z_a, enc.z_b}, eval_t, sched);
        x_a = ddim_step(x_a, eps[0], t, next, sched);
        x_b = ddim_step(x_b, eps[1], t, next, sched);
    }
    enc.x_T_a = std::move(x_a);
    enc.x_T_b = std::move(x_b);
    return enc;
}

Vec initial_morph_state(const EncodedPair& enc, double w, const MorphConfig& cfg) {
    if (cfg.random_initial_noise) {
        std::mt19937_64 rng(cfg.noise_seed);
        return gaussian_vec(rng, enc.x_T_a.size());
    }
    return interpolate(enc.x_T_a, enc.x_T_b, w, InterpMode::slerp);
}

MorphResult dim_morph(const BonaFidePair& pair, double w, const MorphConfig& cfg) {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw std::invalid_argument("blend w must lie in [0, 1]");
    }
    const NoiseSchedule sched = cfg.schedule();
    const GaussianIdentityModel model = cfg.make_model();
    const EncodedPair enc = encode_pair(pair, cfg, model, sched);
    const Vec x_T = initial_morph_state(enc, w, cfg);
    const Vec z_ab = interpolate(enc.z_a, enc.z_b, w, InterpMode::lerp);
    const TimeGrid grid = linear_time_grid(cfg.sample_steps, 0.0, sched.horizon(),
                                           GridDirection::descending);
    SolveResult solved = solve_pf_ode(model, x_T, z_ab, grid, sched, cfg.solver);

    MorphResult result;
    result.x0_ab = std::move(solved.state);
    result.variant = Variant::dim;
    result.nfe = nfe_accounting(NfeMode::dim, cfg.encode_steps, cfg.sample_steps);
    return result;
}

MorphResult morph_pipe(const BonaFidePair& pair, const std::vector<double>& blends,
                       const Heuristic& heuristic, const MorphConfig& cfg) {
    if (blends.empty()) {
        throw std::invalid_argument("morph_pipe needs at least one blend value");
    }
    for (double w : blends) {
        if (!(w >= 0.0 && w <= 1.0)) {
            throw std::invalid_argument("blend values must lie in [0, 1]");
        }
    }
    const NoiseSchedule sched = cfg.schedule();
    const GaussianIdentityModel model = cfg.make_model();
    const EncodedPair enc = encode_pair(pair, cfg, model, sched);
    const TimeGrid grid = linear_time_grid(cfg.sample_steps, 0.0, sched.horizon(),
                                           GridDirection::descending);

    MorphResult best;
    double best_score = 0.0;
    bool have_best = false;
    for (double w : blends) {
        const Vec x_T = initial_morph_state(enc, w, cfg);
        const Vec z_ab = interpolate(enc.z_a, enc.z_b, w, InterpMode::lerp);
        SolveResult solved = solve_pf_ode(model, x_T, z_ab, grid, sched, cfg.solver);
        const double score = heuristic.value(solved.state, pair.x0_a, pair.x0_b);
        if (!have_best || score < best_score) {
            have_best = true;
            best_score = score;
            best.x0_ab = std::move(solved.state);
            best.chosen_blend = w;
        }
    }
    best.variant = Variant::morph_pipe;
    best.heuristic_value = best_score;
    best.nfe = nfe_accounting(NfeMode::morph_pipe, cfg.encode_steps, cfg.sample_steps,
                              static_cast<long long>(blends.size()));
    return best;
}

}  // namespace dimkit
