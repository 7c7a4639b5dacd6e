#pragma once

#include <vector>

#include "dimkit/heuristics.hpp"
#include "dimkit/morph.hpp"
#include "dimkit/optim.hpp"

namespace dimkit {

enum class SearchMode { discrete, continuous_w, epsilon_opt };

// Defaults reproduce the reference hyperparameters: 21 blends for the
// search variants, RAdam(0.01, 0.5, 0.9) with 50 inner iterations for the
// optimization variant, stride 1, full noise level.
struct GreedyConfig {
    int n_opt = 50;
    double lr = 0.01;
    double beta0 = 0.5;
    double beta1 = 0.9;
    int opt_stride = 1;
    double noise_level = 1.0;
    int blend_count = 21;
    SearchMode search_mode = SearchMode::epsilon_opt;
};

struct BlendSearchResult {
    double w = 0.5;
    double heuristic = 0.0;
};

// argmin over the candidate blends of H(x0-prediction of slerp(eps_a, eps_b; w));
// ties go to the lowest candidate index.
BlendSearchResult discrete_blend_search(const Vec& x_t, const Vec& eps_a, const Vec& eps_b,
                                        double t, const NoiseSchedule& sched,
                                        const Heuristic& heuristic, const BonaFidePair& pair,
                                        const std::vector<double>& blends);

// Projected gradient descent on the scalar blend, initialized at w = 0.5,
// clamped to [0, 1] after every step; returns the best iterate seen.
BlendSearchResult continuous_blend_search(const Vec& x_t, const Vec& eps_a, const Vec& eps_b,
                                          double t, const NoiseSchedule& sched,
                                          const Heuristic& heuristic, const BonaFidePair& pair,
                                          const GreedyConfig& cfg);

struct EpsilonOptResult {
    Vec eps;
    double heuristic = 0.0;          // best score seen
    double initial_heuristic = 0.0;  // score of the unoptimized prediction
};

// Inner loop of the optimization variant: n_opt RAdam iterations on the
// noise prediction, minimizing H of its x0 prediction with the stop-gradient
// pullback (the model itself is never differentiated through). (eps*, H*)
// start from the unoptimized prediction, so optimization never hurts the
// local score. best_trace, when given, receives H* after every iteration.
EpsilonOptResult optimize_epsilon(const Vec& x_t, Vec eps, double t,
                                  const NoiseSchedule& sched, const Heuristic& heuristic,
                                  const BonaFidePair& pair, const GreedyConfig& cfg,
                                  std::vector<double>* best_trace = nullptr);

// Per-step discrete blend search over twin noise predictions conditioned on
// z_a and z_b (one batched evaluation per step).
MorphResult greedy_dim_s(const BonaFidePair& pair, const Heuristic& heuristic,
                         const GreedyConfig& greedy, const MorphConfig& cfg);

// Per-step continuous blend search over w in [0, 1].
MorphResult greedy_w_continuous(const BonaFidePair& pair, const Heuristic& heuristic,
                                const GreedyConfig& greedy, const MorphConfig& cfg);

// Per-step noise-prediction optimization; honors opt_stride (optimize every
// k-th step only) and noise_level (truncated start of the sampling grid).
MorphResult greedy_dim_star(const BonaFidePair& pair, const Heuristic& heuristic,
                            const GreedyConfig& greedy, const MorphConfig& cfg);

}  // namespace dimkit
