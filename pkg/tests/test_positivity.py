import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bottchern.algebra import Form
from bottchern.cohomology import aeppli
from bottchern.errors import (DegenerateFrame, DomainError, NonRealForm, PreconditionFailed,
                              TowerInfeasible)
from bottchern.positivity import (GrassmannSample, POSITIVE_TOL, grassmann_sample, is_swp,
                                  kahler_power, sampled_margin, solve_hs_tower, standard_frames)
from bottchern.scalars import GaussRat

from conftest import gauss, kahler_form, real_pp_forms

IU = GaussRat(0, 1)


def test_swp_examples():
    assert is_swp(kahler_form(2)).exact is True
    bad = Form.monomial(2, (1,), (1,), IU) - Form.monomial(2, (2,), (2,), IU)
    res = is_swp(bad)
    assert res.exact is False and not res.passed and res.margin < 0


def test_kahler_power_n4_p2():
    omega = kahler_power(4, 2)
    assert omega == (kahler_form(4) ^ kahler_form(4)) * GaussRat(1, 0) * GaussRat("1/2")
    sample = grassmann_sample(4, 2, 400, seed=3)
    res = is_swp(omega, sample)
    assert res.passed and res.exact is None
    # omega^p/p! takes the value 1 on every coordinate plane
    std = GrassmannSample(4, 2, standard_frames(4, 2), 0, 6)
    assert sampled_margin(omega, std, refine=False).margin == pytest.approx(1.0)


def test_sample_contains_standard_frames():
    s = grassmann_sample(3, 1, 50, seed=1)
    assert s.n_standard == 3 and s.size == 50
    assert np.allclose(s.frames[:3], standard_frames(3, 1))
    # deterministic in the seed
    assert np.array_equal(s.frames, grassmann_sample(3, 1, 50, seed=1).frames)
    with pytest.raises(DomainError):
        grassmann_sample(3, 4)


def test_non_real_rejected():
    with pytest.raises(NonRealForm):
        is_swp(Form.monomial(2, (1,), (1,)))


def test_degenerate_frames():
    frames = np.zeros((3, 1, 2), dtype=complex)
    with pytest.raises(DegenerateFrame):
        sampled_margin(kahler_form(2), GrassmannSample(2, 1, frames, 0, 0))


@pytest.mark.parametrize("n,p,examples", [(3, 1, 100), (3, 2, 100), (4, 3, 30)])
def test_sampling_never_beats_exact(n, p, examples):
    settings(max_examples=examples)(given(data=st.data())(_sampling_vs_exact))(n=n, p=p)


def _sampling_vs_exact(n, p, data):
    omega = data.draw(real_pp_forms(n, p))
    if omega.is_zero():
        return
    sample = grassmann_sample(n, p, 200, seed=0)
    sampled = sampled_margin(omega, sample).margin
    exact = is_swp(omega)
    if sampled > POSITIVE_TOL:
        assert exact.exact
    if exact.exact:
        assert sampled > 0


@given(st.integers(1, 20), st.integers(1, 9))
@settings(max_examples=20)
def test_margin_scales(num, den):
    lam = GaussRat(num, 0) / GaussRat(den, 0)
    omega = kahler_power(3, 2) + (Form.monomial(3, (1, 2), (1, 3)) + Form.monomial(3, (1, 3), (1, 2))) * GaussRat("1/3")
    sample = grassmann_sample(3, 2, 300, seed=5)
    m = sampled_margin(omega, sample).margin
    assert sampled_margin(omega * lam, sample).margin == pytest.approx(float(num / den) * m, rel=1e-6)


# ---------------------------------------------------------------- HS tower


def test_closed_form_has_zero_tower(entries):
    sol = solve_hs_tower(entries["iwasawa"].ops, Form.monomial(3, (1,), (1,), IU))
    assert all(b.is_zero() for b in sol.ladder) and sol.verified


def test_tower_precondition(entries):
    ops = entries["iwasawa"].ops
    # i phi^3 phibar^3 is not del-delbar-closed on the Iwasawa model
    omega = Form.monomial(3, (3,), (3,), IU)
    assert not ops.apply_del(ops.apply_dbar(omega)).is_zero()
    with pytest.raises(PreconditionFailed):
        solve_hs_tower(ops, omega)


def test_tower_infeasible_kodaira_thurston(entries):
    with pytest.raises(TowerInfeasible) as exc:
        solve_hs_tower(entries["kodaira-thurston"].ops, kahler_form(2))
    cert = exc.value.certificate
    assert cert["rank"] < cert["augmented_rank"]


def test_iwasawa_p2_tower(entries):
    ops = entries["iwasawa"].ops
    omega = kahler_power(3, 2)
    sol = solve_hs_tower(ops, omega)
    assert ops.apply_d(sol.assembled()).is_zero()
    assert set(sol.alpha) == {0, 1}
    assert sol.alpha[0].is_zero()  # bidegree (0,4) exceeds n = 3


@pytest.mark.parametrize("name", ["iwasawa", "kodaira-thurston"])
@given(data=st.data())
@settings(max_examples=25)
def test_tower_success_iff_closed(name, entries, data):
    ops = entries[name].ops
    n = ops.n
    ker = aeppli(ops, 1, 1).kernel.basis()
    coeffs = data.draw(st.lists(gauss, min_size=len(ker), max_size=len(ker)))
    f = Form.from_vector(n, 1, 1, {})
    for v, c in zip(ker, coeffs):
        f = f + Form.from_vector(n, 1, 1, v) * c
    omega = f + f.conjugate()
    assert ops.apply_del(ops.apply_dbar(omega)).is_zero()
    try:
        sol = solve_hs_tower(ops, omega)
    except TowerInfeasible as exc:
        assert exc.certificate["rank"] < exc.certificate["augmented_rank"]
        return
    assert ops.apply_d(sol.assembled()).is_zero()


def test_tower_json(entries):
    sol = solve_hs_tower(entries["torus2"].ops, kahler_form(2))
    js = sol.to_json()
    assert js["p"] == 1 and js["verified"] is True
