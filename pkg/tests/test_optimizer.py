"""Tests for the derivative-free ratio maximizer."""

import json
import math

import numpy as np
import pytest

from ltlab import (
    FamilySpec,
    FilterPolicy,
    GridSpec,
    InequalityRequest,
    OptimizerConfig,
    PipelineConfig,
    gamma_sweep,
    maximize_ratio,
    objective_ratio,
)

SMALL_GRID = GridSpec(1, 10.0, 240)
PIPE = PipelineConfig(grid=SMALL_GRID, policy=FilterPolicy())

DELTA_FAMILY = FamilySpec(
    kind="delta_like",
    strength=2.0,
    bounds=((math.log(0.05), math.log(1.0)),),
)

GAUSS_FAMILY = FamilySpec(
    kind="gaussian_sum",
    n_terms=1,
    bounds=((-5.0, -0.5), (-3.0, 3.0), (-2.0, 2.0), (math.log(0.5), math.log(2.0))),
)


class TestFamilySpec:
    def test_arity(self):
        assert DELTA_FAMILY.arity == 1
        assert GAUSS_FAMILY.arity == 4
        fam = FamilySpec("box_sum", n_terms=2, bounds=tuple([(-1.0, 1.0)] * 8))
        assert fam.arity == 8

    def test_build_delta_like(self):
        pot = DELTA_FAMILY.build_potential([math.log(0.1)])
        term = pot.terms[0]
        assert term.kind == "box"
        # integrated strength: amp * 2 * half_width = -strength
        assert term.amplitude.real * 2 * term.width[0] == pytest.approx(-2.0)

    def test_build_gaussian_sum(self):
        pot = GAUSS_FAMILY.build_potential([-2.0, 1.0, 0.5, 0.0])
        term = pot.terms[0]
        assert term.kind == "gaussian"
        assert term.amplitude == pytest.approx(-2.0 + 1.0j)
        assert term.center[0] == pytest.approx(0.5)
        assert term.width[0] == pytest.approx(1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            FamilySpec("mystery", bounds=((0.0, 1.0),))
        with pytest.raises(ValueError):
            FamilySpec("delta_like", bounds=())  # wrong arity
        with pytest.raises(ValueError):
            FamilySpec("delta_like", bounds=((1.0, 1.0),))  # empty interval
        with pytest.raises(ValueError):
            FamilySpec("delta_like", dim=2, bounds=((0.0, 1.0),))

    def test_json_round_trip(self):
        data = json.loads(json.dumps({
            "kind": "delta_like",
            "strength": 2.0,
            "bounds": [[math.log(0.05), math.log(1.0)]],
        }))
        fam = FamilySpec.from_json_dict(data)
        assert fam == DELTA_FAMILY


class TestObjective:
    def test_zero_when_no_bound_state(self):
        # a tiny shallow well on a coarse filtered grid keeps nothing
        fam = FamilySpec("delta_like", strength=1e-6, bounds=((-1.0, 0.0),))
        req = InequalityRequest("davies2", gamma=1.0)
        val = objective_ratio([-0.5], fam, req, PIPE)
        assert val == 0.0

    def test_deterministic(self):
        req = InequalityRequest("davies2", gamma=1.0)
        a = objective_ratio([math.log(0.2)], DELTA_FAMILY, req, PIPE)
        b = objective_ratio([math.log(0.2)], DELTA_FAMILY, req, PIPE)
        assert a == b

    def test_narrower_well_closer_to_saturation(self):
        req = InequalityRequest("davies2", gamma=1.0)
        wide = objective_ratio([math.log(0.8)], DELTA_FAMILY, req, PIPE)
        narrow = objective_ratio([math.log(0.08)], DELTA_FAMILY, req, PIPE)
        assert 0.0 < wide < narrow <= 1.0

    def test_out_of_bounds_penalized(self):
        req = InequalityRequest("davies2", gamma=1.0)
        inside = objective_ratio([math.log(0.06)], DELTA_FAMILY, req, PIPE)
        outside = objective_ratio([math.log(0.05) - 3.0], DELTA_FAMILY, req, PIPE)
        assert outside < inside

    def test_sum_objective(self):
        req = InequalityRequest("thm1_i", gamma=1.5)
        val = objective_ratio([-2.0, 1.0, 0.0, 0.0], GAUSS_FAMILY, req, PIPE)
        assert 0.0 < val <= 1.0


class TestMaximizeRatio:
    CONFIG = OptimizerConfig(pipeline=PIPE, restarts=2, max_evals=25, seed=7)

    def test_deterministic_given_seed(self):
        req = InequalityRequest("davies2", gamma=1.0)
        a = maximize_ratio(DELTA_FAMILY, req, self.CONFIG)
        b = maximize_ratio(DELTA_FAMILY, req, self.CONFIG)
        assert a.to_json_dict() == b.to_json_dict()

    def test_history_nondecreasing(self):
        req = InequalityRequest("davies2", gamma=1.0)
        result = maximize_ratio(DELTA_FAMILY, req, self.CONFIG)
        for r in result.restarts:
            hist = np.array(r.history)
            assert np.all(np.diff(hist) >= 0.0)
            assert r.best_ratio == hist[-1]

    def test_best_is_max_over_restarts(self):
        req = InequalityRequest("davies2", gamma=1.0)
        result = maximize_ratio(DELTA_FAMILY, req, self.CONFIG)
        assert result.best_ratio == max(r.best_ratio for r in result.restarts)
        assert result.eval_count == sum(r.eval_count for r in result.restarts)

    def test_eval_budget_respected(self):
        req = InequalityRequest("davies2", gamma=1.0)
        result = maximize_ratio(DELTA_FAMILY, req, self.CONFIG)
        for r in result.restarts:
            # the simplex finishes the move in flight when the budget runs out
            assert r.eval_count <= self.CONFIG.max_evals + DELTA_FAMILY.arity + 1

    def test_different_seed_changes_start(self):
        req = InequalityRequest("davies2", gamma=1.0)
        a = maximize_ratio(
            DELTA_FAMILY, req, OptimizerConfig(pipeline=PIPE, restarts=1, max_evals=5, seed=1)
        )
        b = maximize_ratio(
            DELTA_FAMILY, req, OptimizerConfig(pipeline=PIPE, restarts=1, max_evals=5, seed=2)
        )
        assert a.restarts[0].history[0] != b.restarts[0].history[0]

    def test_json_schema(self):
        req = InequalityRequest("davies2", gamma=1.0)
        d = maximize_ratio(DELTA_FAMILY, req, self.CONFIG).to_json_dict()
        for key in ("best_ratio", "best_params", "gamma", "which",
                    "conjectural", "eval_count", "seed", "restarts"):
            assert key in d
        assert d["which"] == "davies2"
        assert len(d["restarts"]) == 2
        json.dumps(d)  # serializable

    def test_guaranteed_sum_bound_not_violated(self):
        # guaranteed classical constant at gamma=1.5: the theorem must hold,
        # so the maximizer may not report a ratio beyond 1 + slack
        req = InequalityRequest("thm1_i", gamma=1.5)
        result = maximize_ratio(GAUSS_FAMILY, req, self.CONFIG)
        assert result.best_ratio <= 1.0 + PIPE.slack


class TestGammaSweep:
    CONFIG = OptimizerConfig(pipeline=PIPE, restarts=1, max_evals=12, seed=3)

    def test_flags_and_errors(self):
        req = InequalityRequest("cor_i", gamma=1.5)
        rows = gamma_sweep(GAUSS_FAMILY, [0.25, 0.75, 1.5], req, self.CONFIG)
        assert len(rows) == 3
        assert "error" in rows[0]  # gamma < 1/2 inadmissible in d=1
        assert rows[1]["conjectural"] is True
        assert rows[2]["conjectural"] is False
        assert rows[2]["best_ratio"] >= 0.0

    def test_empty_sweep(self):
        req = InequalityRequest("cor_i", gamma=1.5)
        assert gamma_sweep(GAUSS_FAMILY, [], req, self.CONFIG) == []
