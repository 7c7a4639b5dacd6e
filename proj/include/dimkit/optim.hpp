#pragma once

#include "dimkit/vec.hpp"

namespace dimkit {

// Rectified Adam (https://arxiv.org/abs/1908.03265). beta0/beta1 follow the
// convention used throughout this project for the first/second moment decay
// rates, i.e. Adam's (beta1, beta2). No learning-rate decay or warmup.
struct RAdamState {
    int step = 0;
    Vec first_moment;
    Vec second_moment;
    double beta0 = 0.5;
    double beta1 = 0.9;
    double lr = 0.01;
    double eps_num = 1e-8;
};

RAdamState make_radam_state(std::size_t dim, double lr = 0.01, double beta0 = 0.5,
                            double beta1 = 0.9);

double radam_rho_inf(double beta1);

// rho_k = rho_inf - 2 k beta1^k / (1 - beta1^k); nondecreasing in k. Steps
// with rho_k <= 4 take the plain bias-corrected momentum update, steps with
// rho_k > 4 take the variance-rectified adaptive update.
double radam_rho(int k, double beta1);

// First k (>= 1) with rho_k > 4, i.e. where the adaptive branch engages.
int radam_rectification_step(double beta1);

// One in-place update of param; increments state.step by exactly 1.
void radam_step(RAdamState& state, const Vec& grad, Vec& param);

}  // namespace dimkit
