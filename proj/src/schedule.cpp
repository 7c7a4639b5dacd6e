#include "dimkit/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace dimkit {

NoiseSchedule::NoiseSchedule(double beta_min, double beta_max)
    : beta_min_(beta_min), beta_max_(beta_max) {
    if (!(beta_min > 0.0) || !(beta_min < beta_max)) {
        throw std::invalid_argument("NoiseSchedule requires 0 < beta_min < beta_max");
    }
}

void NoiseSchedule::check_time(double t) const {
    if (!(t >= 0.0) || !(t <= horizon())) {
        throw std::domain_error("time outside [0, T]");
    }
}

double NoiseSchedule::beta(double t) const {
    check_time(t);
    return beta_min_ + t * (beta_max_ - beta_min_);
}

double NoiseSchedule::alpha(double t) const {
    check_time(t);
    return std::exp(-0.25 * t * t * (beta_max_ - beta_min_) - 0.5 * t * beta_min_);
}

double NoiseSchedule::sigma(double t) const {
    const double a = alpha(t);
    return std::sqrt(std::max(0.0, 1.0 - a * a));
}

double NoiseSchedule::snr(double t) const {
    const double a = alpha(t);
    const double s2 = 1.0 - a * a;
    if (s2 <= 0.0) {
        throw std::domain_error("SNR undefined at sigma = 0");
    }
    return a * a / s2;
}

double NoiseSchedule::log_snr_half(double t) const {
    const double sg = sigma(t);
    if (sg <= 0.0) {
        throw std::domain_error("log SNR undefined at sigma = 0");
    }
    return std::log(alpha(t) / sg);
}

double NoiseSchedule::drift(double t) const {
    return -0.5 * beta(t);
}

double NoiseSchedule::diffusion_sq(double t) const {
    return beta(t);
}

NoiseSchedule make_vp_schedule(double beta_min, double beta_max) {
    return NoiseSchedule(beta_min, beta_max);
}

std::pair<double, double> drift_diffusion(const NoiseSchedule& s, double t) {
    return {s.drift(t), s.diffusion_sq(t)};
}

TimeGrid linear_time_grid(int n, double t_min, double t_max, GridDirection direction) {
    if (n < 2) {
        throw std::invalid_argument("time grid needs at least 2 nodes");
    }
    if (!(t_min >= 0.0) || !(t_min < t_max) || !(t_max <= 1.0)) {
        throw std::invalid_argument("time grid requires 0 <= t_min < t_max <= T");
    }
    TimeGrid grid;
    grid.direction = direction;
    grid.nodes.resize(static_cast<std::size_t>(n));
    const double step = (t_max - t_min) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) {
        double t = t_min + step * static_cast<double>(i);
        if (i == n - 1) {
            t = t_max;  // land exactly on the endpoint
        }
        const std::size_t idx = direction == GridDirection::ascending
                                    ? static_cast<std::size_t>(i)
                                    : static_cast<std::size_t>(n - 1 - i);
        grid.nodes[idx] = t;
    }
    return grid;
}

TimeGrid truncate_to_noise_level(const TimeGrid& grid, double noise_level) {
    if (!(noise_level > 0.0) || !(noise_level <= 1.0)) {
        throw std::invalid_argument("noise_level must lie in (0, 1]");
    }
    if (grid.direction != GridDirection::descending) {
        throw std::invalid_argument("noise_level truncation applies to descending grids");
    }
    if (noise_level == 1.0) {
        return grid;
    }
    const auto n = grid.nodes.size();
    auto start = static_cast<std::size_t>((1.0 - noise_level) * static_cast<double>(n));
    if (start > n - 2) {
        start = n - 2;  // keep at least one solver step
    }
    TimeGrid out;
    out.direction = grid.direction;
    out.nodes.assign(grid.nodes.begin() + static_cast<std::ptrdiff_t>(start), grid.nodes.end());
    return out;
}

}  // namespace dimkit
