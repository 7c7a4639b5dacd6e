#include "dimkit/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace dimkit {

RAdamState make_radam_state(std::size_t dim, double lr, double beta0, double beta1) {
    if (!(beta0 > 0.0 && beta0 < 1.0) || !(beta1 > 0.0 && beta1 < 1.0)) {
        throw std::invalid_argument("RAdam betas must lie in (0, 1)");
    }
    if (!(lr > 0.0)) {
        throw std::invalid_argument("RAdam learning rate must be positive");
    }
    RAdamState state;
    state.first_moment = zeros(dim);
    state.second_moment = zeros(dim);
    state.lr = lr;
    state.beta0 = beta0;
    state.beta1 = beta1;
    return state;
}

double radam_rho_inf(double beta1) {
    return 2.0 / (1.0 - beta1) - 1.0;
}

double radam_rho(int k, double beta1) {
    const double bk = std::pow(beta1, k);
    return radam_rho_inf(beta1) - 2.0 * k * bk / (1.0 - bk);
}

int radam_rectification_step(double beta1) {
    for (int k = 1;; ++k) {
        if (radam_rho(k, beta1) > 4.0) {
            return k;
        }
        if (k > 1000000) {
            throw std::domain_error("rho_k never exceeds 4 for this beta1");
        }
    }
}

void radam_step(RAdamState& state, const Vec& grad, Vec& param) {
    if (grad.size() != param.size() || grad.size() != state.first_moment.size()) {
        throw std::invalid_argument("radam_step: dimension mismatch");
    }
    if (!all_finite(grad)) {
        throw std::domain_error("radam_step: non-finite gradient");
    }
    state.step += 1;
    const int k = state.step;
    const double b0 = state.beta0;
    const double b1 = state.beta1;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        state.first_moment[i] = b0 * state.first_moment[i] + (1.0 - b0) * grad[i];
        state.second_moment[i] = b1 * state.second_moment[i] + (1.0 - b1) * grad[i] * grad[i];
    }
    const double bias0 = 1.0 - std::pow(b0, k);
    const double rho_inf = radam_rho_inf(b1);
    const double rho_k = radam_rho(k, b1);
    if (rho_k > 4.0) {
        const double bias1 = 1.0 - std::pow(b1, k);
        const double rect = std::sqrt(((rho_k - 4.0) * (rho_k - 2.0) * rho_inf) /
                                      ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_k));
        for (std::size_t i = 0; i < param.size(); ++i) {
            const double m_hat = state.first_moment[i] / bias0;
            const double v_hat = std::sqrt(state.second_moment[i] / bias1);
            param[i] -= state.lr * rect * m_hat / (v_hat + state.eps_num);
        }
    } else {
        for (std::size_t i = 0; i < param.size(); ++i) {
            param[i] -= state.lr * state.first_moment[i] / bias0;
        }
    }
}

}  // namespace dimkit
