#include "dimkit/solvers.hpp"

#include <cmath>
#include <stdexcept>

namespace dimkit {

Vec x0_from_eps(const Vec& x_t, const Vec& eps, double t, const NoiseSchedule& s) {
    const double a = s.alpha(t);
    if (a <= 0.0) {
        throw std::domain_error("x0_from_eps undefined at alpha = 0");
    }
    const double sg = s.sigma(t);
    Vec out(x_t.size());
    for (std::size_t i = 0; i < x_t.size(); ++i) {
        out[i] = (x_t[i] - sg * eps[i]) / a;
    }
    return out;
}

Vec eps_from_x0(const Vec& x_t, const Vec& x0, double t, const NoiseSchedule& s) {
    const double sg = s.sigma(t);
    if (sg <= 0.0) {
        throw std::domain_error("eps_from_x0 undefined at sigma = 0");
    }
    const double a = s.alpha(t);
    Vec out(x_t.size());
    for (std::size_t i = 0; i < x_t.size(); ++i) {
        out[i] = (x_t[i] - a * x0[i]) / sg;
    }
    return out;
}

Vec ddim_step(const Vec& x_t, const Vec& eps, double t, double s_next,
              const NoiseSchedule& sched) {
    if (t == s_next) {
        throw std::invalid_argument("ddim_step requires t != s_next");
    }
    const double a_t = sched.alpha(t);
    const double sg_t = sched.sigma(t);
    const double a_s = sched.alpha(s_next);
    const double sg_s = sched.sigma(s_next);
    const double ratio = a_s / a_t;
    Vec out(x_t.size());
    for (std::size_t i = 0; i < x_t.size(); ++i) {
        out[i] = ratio * (x_t[i] - sg_t * eps[i]) + sg_s * eps[i];
    }
    return out;
}

namespace {

// First-order data-prediction step, algebraically identical to ddim_step:
// x_s = (sigma_s / sigma_t) x_t + (alpha_s - alpha_t sigma_s / sigma_t) x0.
// Written on (alpha, sigma) directly so sigma_s = 0 needs no special case.
Vec data_prediction_step(const Vec& x_t, const Vec& x0, double t, double s_next,
                         const NoiseSchedule& sched) {
    const double a_t = sched.alpha(t);
    const double sg_t = sched.sigma(t);
    const double a_s = sched.alpha(s_next);
    const double sg_s = sched.sigma(s_next);
    if (sg_t <= 0.0) {
        throw std::domain_error("data-prediction step undefined from sigma = 0");
    }
    const double state_coef = sg_s / sg_t;
    const double data_coef = a_s - a_t * state_coef;
    Vec out(x_t.size());
    for (std::size_t i = 0; i < x_t.size(); ++i) {
        out[i] = state_coef * x_t[i] + data_coef * x0[i];
    }
    return out;
}

}  // namespace

Vec dpmpp_2m_step(const std::vector<X0Prediction>& history, const Vec& x_t, double t,
                  double s_next, const NoiseSchedule& sched) {
    if (history.empty()) {
        throw std::invalid_argument("dpmpp_2m_step needs at least one x0 prediction");
    }
    const X0Prediction& cur = history.back();
    if (cur.t != t) {
        throw std::invalid_argument("newest x0 prediction must be at the current time");
    }
    if (history.size() < 2 || sched.sigma(s_next) <= 0.0) {
        return data_prediction_step(x_t, cur.x0, t, s_next, sched);
    }
    const X0Prediction& prev = history[history.size() - 2];
    // r = h_prev / h with h = lambda(s) - lambda(t), lambda = log(alpha/sigma)
    const double lam_prev = sched.log_snr_half(prev.t);
    const double lam_t = sched.log_snr_half(t);
    const double lam_s = sched.log_snr_half(s_next);
    const double h = lam_s - lam_t;
    const double h_prev = lam_t - lam_prev;
    if (h == 0.0) {
        throw std::invalid_argument("dpmpp_2m_step requires t != s_next");
    }
    const double r = h_prev / h;
    const double c = 1.0 / (2.0 * r);
    Vec extrapolated(cur.x0.size());
    for (std::size_t i = 0; i < extrapolated.size(); ++i) {
        extrapolated[i] = (1.0 + c) * cur.x0[i] - c * prev.x0[i];
    }
    return data_prediction_step(x_t, extrapolated, t, s_next, sched);
}

SolveResult solve_pf_ode(const GaussianIdentityModel& model, const Vec& x_T, const Vec& z,
                         const TimeGrid& grid, const NoiseSchedule& sched, SolverKind kind) {
    if (grid.direction != GridDirection::descending) {
        throw std::invalid_argument("solve_pf_ode expects a descending grid");
    }
    if (kind == SolverKind::dpmpp_2m && grid.size() < 3) {
        throw std::invalid_argument("dpmpp_2m needs a grid of at least 3 nodes");
    }
    Vec x = x_T;
    std::vector<X0Prediction> history;
    for (std::size_t i = 0; i + 1 < grid.nodes.size(); ++i) {
        const double t = grid.nodes[i];
        const double s_next = grid.nodes[i + 1];
        const Vec eps = model.epsilon(x, z, t, sched, true);
        if (kind == SolverKind::ddim) {
            x = ddim_step(x, eps, t, s_next, sched);
        } else {
            history.push_back({t, x0_from_eps(x, eps, t, sched)});
            if (history.size() > 2) {
                history.erase(history.begin());
            }
            x = dpmpp_2m_step(history, x, t, s_next, sched);
        }
    }
    return {std::move(x), static_cast<long long>(grid.size())};
}

SolveResult encode_forward(const GaussianIdentityModel& model, const Vec& x0, const Vec& z,
                           const TimeGrid& grid, const NoiseSchedule& sched, ForwardKind kind) {
    if (grid.direction != GridDirection::ascending) {
        throw std::invalid_argument("encode_forward expects an ascending grid");
    }
    Vec x = x0;
    for (std::size_t i = 0; i + 1 < grid.nodes.size(); ++i) {
        const double t = grid.nodes[i];
        const double next = grid.nodes[i + 1];
        const double eval_t = kind == ForwardKind::diffae_forward ? t : next;
        const Vec eps = model.epsilon(x, z, eval_t, sched, true);
        x = ddim_step(x, eps, t, next, sched);
    }
    return {std::move(x), static_cast<long long>(grid.size())};
}

long long NfeReport::total() const {
    return nfe_accounting(mode, encode_nfe, sample_nfe, blends);
}

long long nfe_accounting(NfeMode mode, long long encode_nfe, long long sample_nfe,
                         std::optional<long long> blends) {
    if (encode_nfe < 0 || sample_nfe < 0) {
        throw std::invalid_argument("nfe components must be nonnegative");
    }
    switch (mode) {
        case NfeMode::dim:
        case NfeMode::greedy_s:
        case NfeMode::greedy_star:
        case NfeMode::fast_dim_style:
            return encode_nfe + sample_nfe;
        case NfeMode::morph_pipe:
            if (!blends.has_value() || *blends < 1) {
                throw std::invalid_argument("morph_pipe accounting needs the blend count B");
            }
            return encode_nfe + *blends * sample_nfe;
    }
    throw std::invalid_argument("unknown NFE mode");
}

}  // namespace dimkit
