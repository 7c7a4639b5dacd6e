#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dimkit/schedule.hpp"
#include "dimkit/vec.hpp"

namespace dimkit {

// Toy semantic encoder: the identity map.
Vec encode_semantic(const Vec& x0);

// Conditional Gaussian data model x0 | z ~ N(z, s^2 I). Its marginal at
// time t is N(alpha_t z, (alpha_t^2 s^2 + sigma_t^2) I), so the exact
// noise prediction
//   eps(x_t, z, t) = sigma_t (x_t - alpha_t z) / (alpha_t^2 s^2 + sigma_t^2)
// is available in closed form and equals -sigma_t * score.
//
// Model parameters are immutable; the NFE counter is the only mutable
// state, so each pipeline run should own its model instance. A batch of
// predictions requested at the same t counts as a single evaluation.
class GaussianIdentityModel {
public:
    GaussianIdentityModel(double data_stddev, int dim);

    double data_stddev() const { return data_stddev_; }
    int dim() const { return dim_; }

    std::int64_t nfe() const { return nfe_; }
    void reset_nfe() const { nfe_ = 0; }

    // count_eval = false marks a call folded into an already-counted batch.
    Vec epsilon(const Vec& x_t, const Vec& z, double t, const NoiseSchedule& s,
                bool count_eval = true) const;

    // Twin predictions at a shared state, one counted evaluation.
    std::pair<Vec, Vec> epsilon_pair(const Vec& x_t, const Vec& z_a, const Vec& z_b,
                                     double t, const NoiseSchedule& s) const;

    // Batched predictions at distinct states, one counted evaluation.
    std::vector<Vec> epsilon_batch(const std::vector<Vec>& states,
                                   const std::vector<Vec>& codes, double t,
                                   const NoiseSchedule& s) const;

    // E[x0 | x_t, z] = (alpha_t s^2 x_t + sigma_t^2 z) / (alpha_t^2 s^2 + sigma_t^2);
    // oracle used by tests, not an NFE-counted evaluation.
    Vec posterior_mean(const Vec& x_t, const Vec& z, double t, const NoiseSchedule& s) const;

private:
    double data_stddev_;
    int dim_;
    mutable std::int64_t nfe_ = 0;
};

}  // namespace dimkit
