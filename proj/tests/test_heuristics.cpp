#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dimkit/heuristics.hpp"
#include "dimkit/verify.hpp"

using namespace dimkit;

namespace {

EmbeddingModel identity_embedding(int n, DistanceKind d, bool normalize = false) {
    std::vector<Vec> rows(static_cast<std::size_t>(n), Vec(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) {
        rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
    }
    return {rows, Vec(static_cast<std::size_t>(n), 0.0), normalize, d};
}

}  // namespace

TEST_CASE("identity embedding passes inputs through") {
    const EmbeddingModel emb = identity_embedding(3, DistanceKind::cosine);
    const Vec x = {0.5, -1.0, 2.0};
    CHECK(emb.embed(x) == x);
}

TEST_CASE("normalized embeddings are unit norm") {
    const EmbeddingModel emb = EmbeddingModel::seeded(8, 42);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        const Vec v = emb.embed(gaussian_vec(rng, 8));
        CHECK(std::abs(norm(v) - 1.0) < 1e-12);
    }
}

TEST_CASE("seeded weights agree with an independent matrix multiply") {
    const EmbeddingModel emb = EmbeddingModel::seeded(6, 7, DistanceKind::cosine,
                                                      /*normalize_output=*/false,
                                                      /*bias_scale=*/0.0);
    std::mt19937_64 rng(2);
    const Vec x = gaussian_vec(rng, 6);
    const Vec y = gaussian_vec(rng, 6);
    // linearity: embed(x + y) = embed(x) + embed(y) for zero bias
    const Vec lhs = emb.embed(add(x, y));
    const Vec rhs = add(emb.embed(x), emb.embed(y));
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
    }
    // orthonormal rows: |embed(x)| = |x|
    CHECK(norm(emb.embed(x)) == doctest::Approx(norm(x)).epsilon(1e-12));
}

TEST_CASE("seeded construction is reproducible and seed sensitive") {
    const EmbeddingModel a = EmbeddingModel::seeded(8, 123);
    const EmbeddingModel b = EmbeddingModel::seeded(8, 123);
    const EmbeddingModel c = EmbeddingModel::seeded(8, 124);
    std::mt19937_64 rng(3);
    const Vec x = gaussian_vec(rng, 8);
    CHECK(a.embed(x) == b.embed(x));
    CHECK(a.embed(x) != c.embed(x));
}

TEST_CASE("zero vector under normalization is rejected") {
    const EmbeddingModel emb = identity_embedding(3, DistanceKind::cosine, true);
    CHECK_THROWS_AS(emb.embed({0.0, 0.0, 0.0}), std::domain_error);
}

TEST_CASE("one-sided collapse doubles the pair distance") {
    const EmbeddingModel emb = EmbeddingModel::seeded(8, 5);
    const Heuristic h(HeuristicKind::id_star, emb);
    std::mt19937_64 rng(4);
    const Vec a = gaussian_vec(rng, 8);
    const Vec b = gaussian_vec(rng, 8);
    // v_ab = v_a: id_part = d(v_a, v_b), id_diff = d(v_a, v_b)
    const double expected = 2.0 * emb.embedded_distance(a, b);
    CHECK(h.value(a, a, b) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("worst-case L2 vanishes at the embedding midpoint") {
    // unnormalized identity embedding so the midpoint is reachable exactly
    const EmbeddingModel emb = identity_embedding(4, DistanceKind::l2);
    const Heuristic h(HeuristicKind::worst_case_l2, emb);
    const Vec a = {1.0, 0.0, 2.0, -1.0};
    const Vec b = {0.0, 1.0, 0.0, 3.0};
    const Vec mid = scaled(add(a, b), 0.5);
    CHECK(h.value(mid, a, b) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("id_star decomposes as id_part plus id_diff") {
    const EmbeddingModel emb = EmbeddingModel::seeded(8, 6);
    const Heuristic star(HeuristicKind::id_star, emb);
    const Heuristic part(HeuristicKind::id_part, emb);
    const Heuristic diff(HeuristicKind::id_diff, emb);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        const Vec x = gaussian_vec(rng, 8);
        const Vec a = gaussian_vec(rng, 8);
        const Vec b = gaussian_vec(rng, 8);
        const double s = star.value(x, a, b);
        const double p = part.value(x, a, b);
        const double d = diff.value(x, a, b);
        CHECK(s == doctest::Approx(p + d).epsilon(1e-12));
        CHECK(s >= p);
        CHECK(p >= 0.0);
        CHECK(s >= d);
        CHECK(d >= 0.0);
        // swapping the bona fides changes nothing
        CHECK(star.value(x, b, a) == doctest::Approx(s).epsilon(1e-12));
        CHECK(diff.value(x, b, a) == doctest::Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("degenerate midpoint for the cosine worst case") {
    const EmbeddingModel emb = identity_embedding(2, DistanceKind::cosine);
    const Heuristic h(HeuristicKind::worst_case_cos, emb);
    const Vec a = {1.0, 0.0};
    const Vec b = {-1.0, 0.0};
    CHECK_THROWS_AS(h.value({0.0, 1.0}, a, b), std::domain_error);
}

TEST_CASE("squared-target surrogate and its gradient") {
    const Heuristic h = Heuristic::toward_target({1.0, -1.0, 0.0});
    const Vec x = {2.0, 0.0, 3.0};
    CHECK(h.value(x, x, x) == doctest::Approx(1.0 + 1.0 + 9.0).epsilon(1e-12));
    const Vec g = h.grad_x(x, x, x);
    CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(g[2] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("gradients match finite differences") {
    for (const CheckResult& r : verify_gradients(40, 1e-5, 77)) {
        CHECK_MESSAGE(r.passed, r.name, ": ", r.detail);
    }
}

TEST_CASE("subgradient at the id_diff kink drops the |.| term") {
    // identity embedding, l2 distance; x equidistant from a and b by
    // construction, with identical floating point norms
    const EmbeddingModel emb = identity_embedding(3, DistanceKind::l2);
    const Heuristic star(HeuristicKind::id_star, emb);
    const Heuristic part(HeuristicKind::id_part, emb);
    const Heuristic diff(HeuristicKind::id_diff, emb);
    const Vec a = {1.0, 0.0, 0.0};
    const Vec b = {-1.0, 0.0, 0.0};
    const Vec x = {0.0, 1.0, 0.0};
    REQUIRE(diff.value(x, a, b) == 0.0);
    const Vec g_star = star.grad_x(x, a, b);
    const Vec g_part = part.grad_x(x, a, b);
    const Vec g_diff = diff.grad_x(x, a, b);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(g_star[i] == g_part[i]);
        CHECK(g_diff[i] == 0.0);
    }
}

TEST_CASE("grad_eps chain rule endpoints") {
    const NoiseSchedule s = make_vp_schedule();
    const Vec gx = {1.0, -2.0};
    // t = 0: sigma = 0, so the pullback vanishes
    const Vec at0 = heuristic_grad_eps(gx, 0.0, s);
    CHECK(at0[0] == 0.0);
    CHECK(at0[1] == 0.0);
    // sigma = alpha: the pullback is exactly -grad_x
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (s.sigma(mid) < s.alpha(mid) ? lo : hi) = mid;
    }
    const double t_eq = 0.5 * (lo + hi);
    const Vec at_eq = heuristic_grad_eps(gx, t_eq, s);
    CHECK(at_eq[0] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(at_eq[1] == doctest::Approx(2.0).epsilon(1e-9));
}
