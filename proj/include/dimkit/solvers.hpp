#pragma once

#include <optional>
#include <vector>

#include "dimkit/schedule.hpp"
#include "dimkit/toymodel.hpp"
#include "dimkit/vec.hpp"

namespace dimkit {

enum class SolverKind { ddim, dpmpp_2m };

// diffae_forward evaluates the noise prediction at the step's start node
// (the stochastic-encoder replacement); ddim_forward uses the reversed-index
// bookkeeping and evaluates at the step's end node. They coincide as the
// step size goes to zero.
enum class ForwardKind { diffae_forward, ddim_forward };

// Data prediction implied by a noise prediction: (x_t - sigma_t eps) / alpha_t.
Vec x0_from_eps(const Vec& x_t, const Vec& eps, double t, const NoiseSchedule& s);

// Noise prediction that explains x_t given a data prediction:
// (x_t - alpha_t x0) / sigma_t. Undefined at sigma_t = 0.
Vec eps_from_x0(const Vec& x_t, const Vec& x0, double t, const NoiseSchedule& s);

// DDIM update from t to s_next (either time direction):
// x_s = (alpha_s / alpha_t) (x_t - sigma_t eps) + sigma_s eps.
Vec ddim_step(const Vec& x_t, const Vec& eps, double t, double s_next,
              const NoiseSchedule& sched);

struct X0Prediction {
    double t;
    Vec x0;
};

// DPM-Solver++(2M) data-prediction update in half-log-SNR time
// (https://arxiv.org/abs/2211.01095, Algo. 2). history holds the most
// recent x0 predictions, newest last; the newest must be at time t.
// Falls back to the first-order (DDIM-equivalent) update on the first
// step and when stepping onto sigma = 0.
Vec dpmpp_2m_step(const std::vector<X0Prediction>& history, const Vec& x_t, double t,
                  double s_next, const NoiseSchedule& sched);

struct SolveResult {
    Vec state;
    // Nominal evaluation count (the configured grid size); the model's own
    // counter tracks raw calls.
    long long nfe = 0;
};

// Integrates the PF-ODE over a descending grid from T to t_min.
SolveResult solve_pf_ode(const GaussianIdentityModel& model, const Vec& x_T, const Vec& z,
                         const TimeGrid& grid, const NoiseSchedule& sched, SolverKind kind);

// Deterministic encoding: integrates the PF-ODE over an ascending grid
// from t_min to T.
SolveResult encode_forward(const GaussianIdentityModel& model, const Vec& x0, const Vec& z,
                           const TimeGrid& grid, const NoiseSchedule& sched, ForwardKind kind);

enum class NfeMode { dim, morph_pipe, greedy_s, greedy_star, fast_dim_style };

struct NfeReport {
    NfeMode mode = NfeMode::dim;
    long long encode_nfe = 0;  // N_E
    long long sample_nfe = 0;  // N
    std::optional<long long> blends;  // B, morph_pipe only

    long long total() const;
};

// Reporting convention: one batched encode of both bona fides counts N_E,
// twin greedy trajectories are batched, and Morph-PIPE's candidates are not,
// so dim / greedy_s / greedy_star / fast_dim_style cost N_E + N while
// morph_pipe costs N_E + B * N.
long long nfe_accounting(NfeMode mode, long long encode_nfe, long long sample_nfe,
                         std::optional<long long> blends = std::nullopt);

}  // namespace dimkit
