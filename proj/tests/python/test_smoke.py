import json
import math

import pytest

import dimkit as dk


def test_schedule_endpoints():
    s = dk.make_vp_schedule(0.1, 20.0)
    assert s.alpha(0.0) == pytest.approx(1.0, abs=1e-15)
    assert s.sigma(0.0) == pytest.approx(0.0, abs=1e-15)
    assert s.alpha(1.0) == pytest.approx(math.exp(-5.025), rel=1e-12)
    snrs = [s.snr(t / 10) for t in range(1, 10)]
    assert all(a > b for a, b in zip(snrs, snrs[1:]))


def test_nfe_accounting_reference_values():
    assert dk.nfe_accounting(dk.NfeMode.dim, 250, 100) == 350
    assert dk.nfe_accounting(dk.NfeMode.morph_pipe, 250, 100, 21) == 2350
    assert dk.nfe_accounting(dk.NfeMode.greedy_s, 250, 100) == 350
    assert dk.nfe_accounting(dk.NfeMode.greedy_star, 250, 20) == 270


def test_eps_invariance_along_ddim():
    s = dk.make_vp_schedule()
    x_t = [0.4, -1.2, 0.9]
    x0 = [0.1, 0.3, -0.5]
    eps_t = dk.eps_from_x0(x_t, x0, 0.8, s)
    x_s = dk.ddim_step(x_t, eps_t, 0.8, 0.3, s)
    eps_s = dk.eps_from_x0(x_s, x0, 0.3, s)
    assert max(abs(a - b) for a, b in zip(eps_s, eps_t)) < 1e-9


def test_slerp_midpoint():
    mid = dk.interpolate([1.0, 0.0], [0.0, 1.0], 0.5, dk.InterpMode.slerp)
    assert mid[0] == pytest.approx(math.sqrt(2) / 2, rel=1e-12)
    assert mid[1] == pytest.approx(math.sqrt(2) / 2, rel=1e-12)


def test_radam_first_step():
    st = dk.make_radam_state(1, lr=0.01, beta0=0.5, beta1=0.9)
    p = dk.radam_step(st, [1.0], [0.0])
    assert p[0] == pytest.approx(-0.01, abs=1e-15)
    assert dk.radam_rectification_step(0.9) == 5


def test_metrics_examples():
    assert dk.mmpmr([[0.7, 0.9]], 0.6) == 1.0
    assert dk.mmpmr([[0.7, 0.9]], 0.8) == 0.0
    scores = [i / 10 for i in range(1, 11)]
    assert dk.threshold_at_fmr(scores, 0.1) == pytest.approx(0.9)
    assert dk.transferability(
        [True, True, False, True], [True, False, True, True]
    ) == pytest.approx(2 / 3)
    assert dk.rsm(0.8, 0.4) == pytest.approx(-dk.rsm(0.4, 0.8))


def test_dim_morph_blend_zero_reconstruction():
    cfg = dk.MorphConfig()
    cfg.sample_steps = 50
    cfg.encode_steps = 80
    pair = dk.BonaFidePair([0.3, -0.5, 1.1, 0.2, 0.0, -0.8, 0.4, 0.6],
                           [0.9, 0.1, -0.3, 0.5, 0.7, 0.2, -0.1, 0.0])
    res = dk.dim_morph(pair, 0.0, cfg)
    err = max(abs(a - b) for a, b in zip(res.x0_ab, pair.x0_a))
    assert err < 1e-3
    assert res.nfe == 80 + 50


def test_greedy_star_improves_guidance_score():
    cfg = dk.MorphConfig()
    cfg.sample_steps = 20
    cfg.encode_steps = 40
    pair = dk.BonaFidePair([1.5, 0.5, 0.3, 0.0, 0.2, -0.4, 0.8, -0.2],
                           [0.5, 1.5, -0.3, 0.4, -0.2, 0.6, 0.1, 0.3])
    h = dk.Heuristic(dk.HeuristicKind.id_star, dk.EmbeddingModel.seeded(8, 17))
    star = dk.greedy_dim_star(pair, h, dk.GreedyConfig(), cfg)
    base = dk.dim_morph(pair, 0.5, cfg)
    assert h.value(star.x0_ab, pair.x0_a, pair.x0_b) <= h.value(
        base.x0_ab, pair.x0_a, pair.x0_b
    )
    assert len(star.per_step) == cfg.sample_steps - 1


def test_experiment_runner_deterministic():
    cfg = json.loads(dk.default_config_json())
    cfg["pairs"] = 3
    cfg["encode_steps"] = 20
    cfg["variants"] = [
        {"name": "dim", "sample_steps": 10},
        {"name": "greedy_star", "sample_steps": 10},
    ]
    csv1, summary1 = dk.run_experiment_json(json.dumps(cfg))
    csv2, summary2 = dk.run_experiment_json(json.dumps(cfg))
    assert csv1 == csv2
    assert summary1 == summary2
    parsed = json.loads(summary1)
    assert parsed["variants"]["dim"]["nfe"] == 30
    assert set(parsed["thresholds"]) == {"eval_101", "eval_211", "eval_307"}


def test_verify_suite_selector():
    results = dk.verify_suite("theorem1")
    assert len(results) == 1
    name, passed, detail = results[0]
    assert passed, detail
