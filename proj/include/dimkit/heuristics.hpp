#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dimkit/schedule.hpp"
#include "dimkit/vec.hpp"

namespace dimkit {

enum class DistanceKind { cosine, l2 };

// Fixed linear stand-in for a face-recognition embedder: v = W x + b,
// optionally L2-normalized. Never trained; seeded construction draws a
// random orthonormal W and a small bias so distinct seeds give genuinely
// different systems.
class EmbeddingModel {
public:
    EmbeddingModel(std::vector<Vec> weight_rows, Vec bias, bool normalize_output,
                   DistanceKind distance);

    static EmbeddingModel seeded(int dim, std::uint64_t seed,
                                 DistanceKind distance = DistanceKind::cosine,
                                 bool normalize_output = true, double bias_scale = 0.1);

    int input_dim() const;
    int output_dim() const;
    bool normalize_output() const { return normalize_; }
    DistanceKind distance_kind() const { return distance_; }

    Vec embed(const Vec& x) const;
    double distance(const Vec& u, const Vec& v) const;

    // d(embed(x), embed(y)) with the model's configured distance.
    double embedded_distance(const Vec& x, const Vec& y) const;

    // Chain rule through embed: given dH/d(embed(x)), returns dH/dx.
    Vec pullback(const Vec& x, const Vec& grad_out) const;

private:
    std::vector<Vec> weight_;  // row-major, output_dim rows
    Vec bias_;
    bool normalize_;
    DistanceKind distance_;
};

double cosine_distance(const Vec& u, const Vec& v);
double l2_distance(const Vec& u, const Vec& v);

enum class HeuristicKind {
    id_star,         // d(v_ab, v_a) + d(v_ab, v_b) + |d(v_ab, v_a) - d(v_ab, v_b)|
    id_part,         // d(v_ab, v_a) + d(v_ab, v_b)
    id_diff,         // |d(v_ab, v_a) - d(v_ab, v_b)|
    worst_case_l2,   // ||v_ab - (v_a + v_b)/2||
    worst_case_cos,  // cosine distance to the normalized midpoint
    squared_target,  // ||x - target||^2, bypasses the embedding
};

// Scores a candidate morph against the two bona fides. Lower is better.
// The gradient is exact for the linear embedding; at the id_diff kink
// (equidistant v_ab) the |.| term contributes subgradient zero.
class Heuristic {
public:
    Heuristic(HeuristicKind kind, EmbeddingModel embedding);

    // squared_target surrogate, used by the optimality demonstrations.
    static Heuristic toward_target(Vec target);

    HeuristicKind kind() const { return kind_; }
    const EmbeddingModel& embedding() const;

    double value(const Vec& x_ab, const Vec& x0_a, const Vec& x0_b) const;
    Vec grad_x(const Vec& x_ab, const Vec& x0_a, const Vec& x0_b) const;

private:
    Heuristic() = default;

    HeuristicKind kind_ = HeuristicKind::id_star;
    std::optional<EmbeddingModel> embedding_;
    Vec target_;
};

// Pullback of a heuristic gradient from data space to noise-prediction
// space through the x0 prediction: grad_eps = -(sigma_t / alpha_t) grad_x.
// The epsilon model itself is never differentiated through.
Vec heuristic_grad_eps(const Vec& grad_x, double t, const NoiseSchedule& s);

}  // namespace dimkit
