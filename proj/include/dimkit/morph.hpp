#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dimkit/heuristics.hpp"
#include "dimkit/schedule.hpp"
#include "dimkit/solvers.hpp"
#include "dimkit/toymodel.hpp"
#include "dimkit/vec.hpp"

namespace dimkit {

enum class InterpMode { slerp, lerp };

// slerp(u, v; g) = [sin((1-g) theta) u + sin(g theta) v] / sin(theta) with
// theta the angle between u and v; falls back to lerp when theta < 1e-6.
Vec interpolate(const Vec& u, const Vec& v, double gamma, InterpMode mode);

// count uniformly spaced blend values on [0, 1]; {0.5} for count == 1.
std::vector<double> uniform_blends(int count);

struct BonaFidePair {
    Vec x0_a;
    Vec x0_b;
    std::string label_a = "a";
    std::string label_b = "b";
};

enum class Variant { dim, morph_pipe, greedy_s, greedy_w, greedy_star };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct StepRecord {
    double t = 0.0;
    std::optional<double> blend;
    std::optional<double> heuristic;
};

struct MorphResult {
    Vec x0_ab;
    long long nfe = 0;
    std::vector<StepRecord> per_step;
    Variant variant = Variant::dim;
    std::optional<double> chosen_blend;     // morph_pipe winner
    std::optional<double> heuristic_value;  // score of the returned morph
};

struct MorphConfig {
    double beta_min = 0.1;
    double beta_max = 20.0;
    double data_stddev = 0.05;
    int dim = 8;
    int encode_steps = 250;  // N_F / N_E, forward grid nodes
    int sample_steps = 100;  // N, sampling grid nodes
    SolverKind solver = SolverKind::ddim;
    ForwardKind forward_solver = ForwardKind::diffae_forward;
    // Ablation: draw x_T^(ab) ~ N(0, I) instead of slerping the encodings.
    bool random_initial_noise = false;
    std::uint64_t noise_seed = 0;

    NoiseSchedule schedule() const { return NoiseSchedule(beta_min, beta_max); }
    GaussianIdentityModel make_model() const { return {data_stddev, dim}; }
};

struct EncodedPair {
    Vec x_T_a;
    Vec x_T_b;
    Vec z_a;
    Vec z_b;
};

// Encodes both bona fides along the ascending grid; the twin evaluations at
// each node are batched so the counted cost stays one encoding pass.
EncodedPair encode_pair(const BonaFidePair& pair, const MorphConfig& cfg,
                        const GaussianIdentityModel& model, const NoiseSchedule& sched);

// Morphed initial state: slerp of the twin encodings (or seeded random noise
// under the ablation flag).
Vec initial_morph_state(const EncodedPair& enc, double w, const MorphConfig& cfg);

// Unguided pipeline: encode both bona fides, slerp the noises, lerp the
// codes, solve the PF-ODE back to t = 0.
MorphResult dim_morph(const BonaFidePair& pair, double w, const MorphConfig& cfg);

// Brute-force candidate search: one dim_morph per blend value, scored with
// the heuristic on the finished morphs; argmin wins (lowest index on ties).
MorphResult morph_pipe(const BonaFidePair& pair, const std::vector<double>& blends,
                       const Heuristic& heuristic, const MorphConfig& cfg);

}  // namespace dimkit
