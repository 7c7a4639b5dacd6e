#include "dimkit/heuristics.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace dimkit {

namespace {

constexpr double kDegenerateNorm = 1e-12;

Vec orthonormal_rows(int dim, std::mt19937_64& rng) {
    // Gram-Schmidt on Gaussian draws; redraw on (improbable) near-collapse.
    std::vector<Vec> rows;
    rows.reserve(static_cast<std::size_t>(dim));
    while (static_cast<int>(rows.size()) < dim) {
        Vec candidate = gaussian_vec(rng, static_cast<std::size_t>(dim));
        for (const Vec& prev : rows) {
            axpy(-dot(candidate, prev), prev, candidate);
        }
        const double len = norm(candidate);
        if (len < 1e-6) {
            continue;
        }
        rows.push_back(scaled(candidate, 1.0 / len));
    }
    // flatten handled by caller
    Vec flat;
    flat.reserve(static_cast<std::size_t>(dim * dim));
    for (const Vec& row : rows) {
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return flat;
}

}  // namespace

EmbeddingModel::EmbeddingModel(std::vector<Vec> weight_rows, Vec bias, bool normalize_output,
                               DistanceKind distance)
    : weight_(std::move(weight_rows)),
      bias_(std::move(bias)),
      normalize_(normalize_output),
      distance_(distance) {
    if (weight_.empty()) {
        throw std::invalid_argument("embedding weight must be nonempty");
    }
    const std::size_t in_dim = weight_.front().size();
    for (const Vec& row : weight_) {
        if (row.size() != in_dim) {
            throw std::invalid_argument("embedding weight rows must have equal length");
        }
    }
    if (bias_.size() != weight_.size()) {
        throw std::invalid_argument("embedding bias length must match output dimension");
    }
}

EmbeddingModel EmbeddingModel::seeded(int dim, std::uint64_t seed, DistanceKind distance,
                                      bool normalize_output, double bias_scale) {
    if (dim < 1) {
        throw std::invalid_argument("embedding dimension must be >= 1");
    }
    std::mt19937_64 rng(seed);
    const Vec flat = orthonormal_rows(dim, rng);
    std::vector<Vec> rows(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        rows[static_cast<std::size_t>(i)] =
            Vec(flat.begin() + static_cast<std::ptrdiff_t>(i) * dim,
                flat.begin() + static_cast<std::ptrdiff_t>(i + 1) * dim);
    }
    Vec bias = gaussian_vec(rng, static_cast<std::size_t>(dim));
    for (double& b : bias) {
        b *= bias_scale;
    }
    return EmbeddingModel(std::move(rows), std::move(bias), normalize_output, distance);
}

int EmbeddingModel::input_dim() const {
    return static_cast<int>(weight_.front().size());
}

int EmbeddingModel::output_dim() const {
    return static_cast<int>(weight_.size());
}

Vec EmbeddingModel::embed(const Vec& x) const {
    if (static_cast<int>(x.size()) != input_dim()) {
        throw std::invalid_argument("embed: input dimension mismatch");
    }
    Vec v(weight_.size());
    for (std::size_t i = 0; i < weight_.size(); ++i) {
        v[i] = dot(weight_[i], x) + bias_[i];
    }
    if (!normalize_) {
        return v;
    }
    const double len = norm(v);
    if (len < kDegenerateNorm) {
        throw std::domain_error("embed: cannot normalize a zero embedding");
    }
    return scaled(v, 1.0 / len);
}

double cosine_distance(const Vec& u, const Vec& v) {
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu < kDegenerateNorm || nv < kDegenerateNorm) {
        throw std::domain_error("cosine distance undefined for zero vectors");
    }
    return 1.0 - dot(u, v) / (nu * nv);
}

double l2_distance(const Vec& u, const Vec& v) {
    return dist(u, v);
}

double EmbeddingModel::distance(const Vec& u, const Vec& v) const {
    return distance_ == DistanceKind::cosine ? cosine_distance(u, v) : l2_distance(u, v);
}

double EmbeddingModel::embedded_distance(const Vec& x, const Vec& y) const {
    return distance(embed(x), embed(y));
}

Vec EmbeddingModel::pullback(const Vec& x, const Vec& grad_out) const {
    if (static_cast<int>(grad_out.size()) != output_dim()) {
        throw std::invalid_argument("pullback: gradient dimension mismatch");
    }
    Vec g = grad_out;
    if (normalize_) {
        // v = Wx + b before normalization; J^T g = (g - (u.g) u) / |v|
        Vec v(weight_.size());
        for (std::size_t i = 0; i < weight_.size(); ++i) {
            v[i] = dot(weight_[i], x) + bias_[i];
        }
        const double len = norm(v);
        if (len < kDegenerateNorm) {
            throw std::domain_error("pullback: zero embedding");
        }
        const Vec u = scaled(v, 1.0 / len);
        const double along = dot(u, g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] = (g[i] - along * u[i]) / len;
        }
    }
    Vec out(static_cast<std::size_t>(input_dim()), 0.0);
    for (std::size_t i = 0; i < weight_.size(); ++i) {
        axpy(g[i], weight_[i], out);
    }
    return out;
}

namespace {

// d/du of the configured distance d(u, c) with c held fixed.
Vec distance_grad_u(DistanceKind kind, const Vec& u, const Vec& c) {
    if (kind == DistanceKind::l2) {
        const double d = dist(u, c);
        if (d < kDegenerateNorm) {
            return zeros(u.size());  // subgradient at coincidence
        }
        Vec g = sub(u, c);
        return scaled(g, 1.0 / d);
    }
    const double nu = norm(u);
    const double nc = norm(c);
    if (nu < kDegenerateNorm || nc < kDegenerateNorm) {
        throw std::domain_error("cosine distance gradient undefined for zero vectors");
    }
    const double cross = dot(u, c);
    Vec g(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        g[i] = -(c[i] / (nu * nc) - cross * u[i] / (nu * nu * nu * nc));
    }
    return g;
}

}  // namespace

Heuristic::Heuristic(HeuristicKind kind, EmbeddingModel embedding)
    : kind_(kind), embedding_(std::move(embedding)) {
    if (kind == HeuristicKind::squared_target) {
        throw std::invalid_argument("squared_target heuristics carry a target, not an embedding");
    }
}

Heuristic Heuristic::toward_target(Vec target) {
    Heuristic h;
    h.kind_ = HeuristicKind::squared_target;
    h.target_ = std::move(target);
    return h;
}

const EmbeddingModel& Heuristic::embedding() const {
    if (!embedding_.has_value()) {
        throw std::logic_error("heuristic has no embedding model");
    }
    return *embedding_;
}

double Heuristic::value(const Vec& x_ab, const Vec& x0_a, const Vec& x0_b) const {
    if (kind_ == HeuristicKind::squared_target) {
        const double d = dist(x_ab, target_);
        return d * d;
    }
    const EmbeddingModel& emb = *embedding_;
    const Vec v_ab = emb.embed(x_ab);
    const Vec v_a = emb.embed(x0_a);
    const Vec v_b = emb.embed(x0_b);
    switch (kind_) {
        case HeuristicKind::id_part:
            return emb.distance(v_ab, v_a) + emb.distance(v_ab, v_b);
        case HeuristicKind::id_diff:
            return std::abs(emb.distance(v_ab, v_a) - emb.distance(v_ab, v_b));
        case HeuristicKind::id_star: {
            const double da = emb.distance(v_ab, v_a);
            const double db = emb.distance(v_ab, v_b);
            return da + db + std::abs(da - db);
        }
        case HeuristicKind::worst_case_l2: {
            Vec mid = add(v_a, v_b);
            mid = scaled(mid, 0.5);
            return l2_distance(v_ab, mid);
        }
        case HeuristicKind::worst_case_cos: {
            Vec mid = add(v_a, v_b);
            const double len = norm(mid);
            if (len < kDegenerateNorm) {
                throw std::domain_error("worst_case_cos: degenerate midpoint (v_a = -v_b)");
            }
            return cosine_distance(v_ab, scaled(mid, 1.0 / len));
        }
        default:
            break;
    }
    throw std::logic_error("unhandled heuristic kind");
}

Vec Heuristic::grad_x(const Vec& x_ab, const Vec& x0_a, const Vec& x0_b) const {
    if (kind_ == HeuristicKind::squared_target) {
        Vec g = sub(x_ab, target_);
        return scaled(g, 2.0);
    }
    const EmbeddingModel& emb = *embedding_;
    const Vec v_ab = emb.embed(x_ab);
    const Vec v_a = emb.embed(x0_a);
    const Vec v_b = emb.embed(x0_b);
    const DistanceKind dk = emb.distance_kind();
    Vec grad_u;
    switch (kind_) {
        case HeuristicKind::id_part:
            grad_u = add(distance_grad_u(dk, v_ab, v_a), distance_grad_u(dk, v_ab, v_b));
            break;
        case HeuristicKind::id_diff:
        case HeuristicKind::id_star: {
            const double da = emb.distance(v_ab, v_a);
            const double db = emb.distance(v_ab, v_b);
            const Vec ga = distance_grad_u(dk, v_ab, v_a);
            const Vec gb = distance_grad_u(dk, v_ab, v_b);
            // |da - db| contributes sign(da - db)(ga - gb); zero at the kink.
            const double sign = da > db ? 1.0 : (da < db ? -1.0 : 0.0);
            Vec diff_part = sub(ga, gb);
            diff_part = scaled(diff_part, sign);
            grad_u = kind_ == HeuristicKind::id_diff ? diff_part
                                                     : add(add(ga, gb), diff_part);
            break;
        }
        case HeuristicKind::worst_case_l2: {
            Vec mid = scaled(add(v_a, v_b), 0.5);
            grad_u = distance_grad_u(DistanceKind::l2, v_ab, mid);
            break;
        }
        case HeuristicKind::worst_case_cos: {
            Vec mid = add(v_a, v_b);
            const double len = norm(mid);
            if (len < kDegenerateNorm) {
                throw std::domain_error("worst_case_cos: degenerate midpoint (v_a = -v_b)");
            }
            grad_u = distance_grad_u(DistanceKind::cosine, v_ab, scaled(mid, 1.0 / len));
            break;
        }
        default:
            throw std::logic_error("unhandled heuristic kind");
    }
    return emb.pullback(x_ab, grad_u);
}

Vec heuristic_grad_eps(const Vec& grad_x, double t, const NoiseSchedule& s) {
    const double a = s.alpha(t);
    if (a <= 0.0) {
        throw std::domain_error("heuristic_grad_eps undefined at alpha = 0");
    }
    return scaled(grad_x, -s.sigma(t) / a);
}

}  // namespace dimkit
