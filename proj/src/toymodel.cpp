#include "dimkit/toymodel.hpp"

#include <cmath>
#include <stdexcept>

namespace dimkit {

Vec encode_semantic(const Vec& x0) {
    return x0;
}

GaussianIdentityModel::GaussianIdentityModel(double data_stddev, int dim)
    : data_stddev_(data_stddev), dim_(dim) {
    if (data_stddev < 0.0) {
        throw std::invalid_argument("data_stddev must be >= 0");
    }
    if (dim < 1) {
        throw std::invalid_argument("dimension must be >= 1");
    }
}

Vec GaussianIdentityModel::epsilon(const Vec& x_t, const Vec& z, double t,
                                   const NoiseSchedule& s, bool count_eval) const {
    if (static_cast<int>(x_t.size()) != dim_ || static_cast<int>(z.size()) != dim_) {
        throw std::invalid_argument("state/code dimension mismatch");
    }
    const double a = s.alpha(t);
    const double sg = s.sigma(t);
    const double denom = a * a * data_stddev_ * data_stddev_ + sg * sg;
    if (count_eval) {
        ++nfe_;
    }
    Vec out(x_t.size());
    bool on_mean = true;
    for (std::size_t i = 0; i < x_t.size(); ++i) {
        out[i] = x_t[i] - a * z[i];
        on_mean = on_mean && out[i] == 0.0;
    }
    if (denom <= 0.0) {
        // t = 0 with s = 0; only the exactly on-mean input has a finite limit.
        if (on_mean) {
            return out;
        }
        throw std::domain_error("epsilon undefined: degenerate marginal (t = 0, s = 0)");
    }
    const double scale = sg / denom;
    for (double& v : out) {
        v *= scale;
    }
    return out;
}

std::pair<Vec, Vec> GaussianIdentityModel::epsilon_pair(const Vec& x_t, const Vec& z_a,
                                                        const Vec& z_b, double t,
                                                        const NoiseSchedule& s) const {
    Vec eps_a = epsilon(x_t, z_a, t, s, true);
    Vec eps_b = epsilon(x_t, z_b, t, s, false);
    return {std::move(eps_a), std::move(eps_b)};
}

std::vector<Vec> GaussianIdentityModel::epsilon_batch(const std::vector<Vec>& states,
                                                      const std::vector<Vec>& codes,
                                                      double t, const NoiseSchedule& s) const {
    if (states.size() != codes.size() || states.empty()) {
        throw std::invalid_argument("epsilon_batch needs equal, nonempty state/code lists");
    }
    std::vector<Vec> out;
    out.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        out.push_back(epsilon(states[i], codes[i], t, s, i == 0));
    }
    return out;
}

Vec GaussianIdentityModel::posterior_mean(const Vec& x_t, const Vec& z, double t,
                                          const NoiseSchedule& s) const {
    const double a = s.alpha(t);
    const double sg = s.sigma(t);
    const double s2 = data_stddev_ * data_stddev_;
    const double denom = a * a * s2 + sg * sg;
    if (denom <= 0.0) {
        throw std::domain_error("posterior undefined: degenerate marginal");
    }
    Vec out(x_t.size());
    for (std::size_t i = 0; i < x_t.size(); ++i) {
        out[i] = (a * s2 * x_t[i] + sg * sg * z[i]) / denom;
    }
    return out;
}

}  // namespace dimkit
