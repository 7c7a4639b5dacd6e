#pragma once

#include <cstddef>
#include <vector>

namespace dimkit {

// Variance-preserving noise schedule with a linear beta ramp,
//   beta(t)  = beta_min + t * (beta_max - beta_min)
//   alpha_t  = exp(-t^2 (beta_max - beta_min) / 4 - t beta_min / 2)
//   sigma_t  = sqrt(1 - alpha_t^2)
// so that alpha_t^2 + sigma_t^2 == 1 on the horizon [0, 1].
class NoiseSchedule {
public:
    NoiseSchedule(double beta_min, double beta_max);

    double beta_min() const { return beta_min_; }
    double beta_max() const { return beta_max_; }
    double horizon() const { return 1.0; }

    double beta(double t) const;
    double alpha(double t) const;
    double sigma(double t) const;
    double snr(double t) const;

    // lambda_t = log(alpha_t / sigma_t); requires t > 0 (sigma_0 == 0).
    double log_snr_half(double t) const;

    // f(t) = d log alpha_t / dt = -beta(t) / 2
    double drift(double t) const;
    // g^2(t) = d sigma_t^2 / dt - 2 f(t) sigma_t^2 = beta(t)
    double diffusion_sq(double t) const;

private:
    void check_time(double t) const;

    double beta_min_;
    double beta_max_;
};

NoiseSchedule make_vp_schedule(double beta_min = 0.1, double beta_max = 20.0);

// (f, g^2) at time t.
std::pair<double, double> drift_diffusion(const NoiseSchedule& s, double t);

enum class GridDirection { descending, ascending };

// Nodes are stored in traversal order: descending grids run T -> t_min
// (sampling), ascending grids run t_min -> T (encoding).
struct TimeGrid {
    std::vector<double> nodes;
    GridDirection direction = GridDirection::descending;

    std::size_t size() const { return nodes.size(); }
};

TimeGrid linear_time_grid(int n, double t_min, double t_max, GridDirection direction);

// Drops the leading nodes of a descending grid so traversal starts from a
// partially noised state: keeps nodes[int((1 - noise_level) * n):].
TimeGrid truncate_to_noise_level(const TimeGrid& grid, double noise_level);

}  // namespace dimkit
