import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lsistab.acceptance import grid_search_projection
from lsistab.errors import DegenerateInputError, ParameterError
from lsistab.fields import constant, exp_tilt, gaussian_trial, hermite_perturb
from lsistab.project import distance_sq, optimal_c, project_to_extremals, stability_ratio


def test_constant_projects_to_itself():
    res = project_to_extremals(constant())
    assert res.residual_sq <= 1e-20
    assert res.c_star == pytest.approx(1.0, abs=1e-10)
    assert np.max(np.abs(res.a_star)) <= 1e-6


@settings(max_examples=15)
@given(c=st.floats(0.5, 2.0), a=st.floats(-1.0, 1.0), b=st.floats(-1.0, 1.0))
def test_extremals_project_to_themselves(c, a, b):
    res = project_to_extremals(exp_tilt(c, [a, b], 2))
    assert res.residual_sq <= 1e-9
    assert np.allclose(res.a_star, [a, b], atol=1e-4)


def test_u1_projection_against_closed_form_and_grid():
    u = gaussian_trial(1.0, 1)
    res = project_to_extremals(u)
    assert res.residual_sq == pytest.approx(1 - math.sqrt(3) / 2, abs=1e-8)
    assert abs(res.a_star[0]) <= 1e-6
    assert res.c_star == pytest.approx(math.sqrt(2) * 3**0.25 / 2, abs=1e-8)
    a_grid, v_grid = grid_search_projection(u)
    assert abs(a_grid) <= 1e-3
    assert v_grid == pytest.approx(res.residual_sq, abs=1e-8)
    assert res.converged


def test_optimal_c_and_distance_consistent():
    u = hermite_perturb(2, 0.1)
    for a in (-0.3, 0.0, 0.4):
        c = optimal_c(u, a)
        d = distance_sq(u, c, a)
        assert d <= distance_sq(u, c * 1.01, a)
        assert d <= distance_sq(u, c * 0.99, a)


def test_projection_is_deterministic():
    u = hermite_perturb(4, 0.1)
    r1, r2 = project_to_extremals(u, seed=7), project_to_extremals(u, seed=7)
    assert r1.residual_sq == r2.residual_sq and np.array_equal(r1.a_star, r2.a_star)


def test_projection_residual_below_distance_to_one():
    u = gaussian_trial(0.3, 2)
    res = project_to_extremals(u)
    assert res.residual_sq <= distance_sq(u, 1.0, [0.0, 0.0]) + 1e-15


def test_stability_ratio_values():
    assert stability_ratio(gaussian_trial(1.0, 1)) == pytest.approx(10.568395, abs=1e-5)
    with pytest.raises(DegenerateInputError):
        stability_ratio(exp_tilt(2.0, 0.5, 1))


def test_restarts_validated():
    with pytest.raises(ParameterError):
        project_to_extremals(constant(), restarts=0)


def test_to_dict_is_json_ready():
    d = project_to_extremals(gaussian_trial(0.5, 2)).to_dict()
    assert isinstance(d["a_star"], list) and len(d["a_star"]) == 2
