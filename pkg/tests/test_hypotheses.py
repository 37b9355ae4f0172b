import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bottchern.algebra import Form
from bottchern.errors import DomainError, NonRealForm, TowerInfeasible, WrongDimension
from bottchern.hypotheses import (angella_tomassini, check_ddbar, check_ddbar_manifold, check_Hk,
                                  check_Htilde_k, check_star_k, dbar_exact, del_exact_closed,
                                  e1_degeneration, hypothesis_chain, sgg_check, skt_hs_equivalence,
                                  star_bidegrees, verify_witness)
from bottchern.induced import induced_That, valid_pk

from conftest import COFRAME_NAMES, gauss, hermitian_form, kahler_form


def test_ddbar_examples(entries):
    assert check_ddbar_manifold(entries["torus3"].ops).verdict
    for name in ("iwasawa", "kodaira-thurston"):
        rec = check_ddbar_manifold(entries[name].ops)
        assert rec.verdict is False
        assert entries[name].ops.apply_d(rec.witness).is_zero()
    with pytest.raises(DomainError):
        check_ddbar(entries["torus2"].ops, 3, 0)


def test_torus_all_true(entries):
    for name in ("torus2", "torus3"):
        rep = hypothesis_chain(entries[name].ops)
        assert all(r.verdict for r in rep.records)


def test_kodaira_thurston_H1_witness(entries):
    ops = entries["kodaira-thurston"].ops
    rec = check_Hk(ops, 1, 1)
    assert rec.verdict is False and verify_witness(ops, rec.witness, strong=False)
    # del of the standard SKT metric is d-closed, del-exact and not dbar-exact
    omega = kahler_form(2)
    g = ops.apply_del(omega)
    assert ops.apply_d(g).is_zero()
    v = g.to_vector(2, 1)
    assert del_exact_closed(ops, 2, 1).contains(v)
    assert not dbar_exact(ops, 2, 1).contains(v)


def test_iwasawa_star_2_fails(entries):
    rec = check_star_k(entries["iwasawa"].ops, 2)
    assert rec.verdict is False
    assert verify_witness(entries["iwasawa"].ops, rec.witness, strong=True)


def test_star_bidegrees(entries):
    # k = 0 on a surface: (0,0), its shift (1,0), and the dual total degree 4
    assert star_bidegrees(2, 0) == [(0, 0), (1, 0), (2, 2)]
    assert (2, 1) in star_bidegrees(2, 2)
    with pytest.raises(DomainError):
        check_star_k(entries["torus2"].ops, 5)


def test_pk_range(entries):
    with pytest.raises(DomainError):
        check_Hk(entries["torus2"].ops, 1, 2)
    with pytest.raises(DomainError):
        check_Htilde_k(entries["torus2"].ops, 0, 1)


@pytest.mark.parametrize("name", COFRAME_NAMES)
def test_verdict_chain_and_witnesses(name, entries):
    ops = entries[name].ops
    ddbar = check_ddbar_manifold(ops).verdict
    for p, k in valid_pk(ops.n):
        ht = check_Htilde_k(ops, p, k)
        h = check_Hk(ops, p, k)
        assert not ddbar or ht.verdict
        assert not ht.verdict or h.verdict
        assert ht.verdict == induced_That(ops, p, k).is_zero
        for rec, strong in ((ht, True), (h, False)):
            if not rec.verdict and rec.witness is not None:
                assert verify_witness(ops, rec.witness, strong)
    if all(check_star_k(ops, k).verdict for k in range(2 * ops.n + 1)):
        assert e1_degeneration(ops).verdict


@pytest.mark.parametrize("name", COFRAME_NAMES)
def test_angella_tomassini(name, entries):
    ops = entries[name].ops
    for k in range(2 * ops.n + 1):
        at = angella_tomassini(ops, k)
        assert at.slack >= 0
        if check_star_k(ops, k).verdict:
            assert at.slack == 0
        if name.startswith("torus"):
            assert at.slack == 0


def test_angella_tomassini_values(entries):
    iw = [angella_tomassini(entries["iwasawa"].ops, k).slack for k in range(7)]
    kt = [angella_tomassini(entries["kodaira-thurston"].ops, k).slack for k in range(5)]
    assert iw == [0, 2, 6, 8, 6, 2, 0]
    assert kt == [0, 0, 2, 0, 0]


def test_e1_degeneration(entries):
    assert e1_degeneration(entries["torus2"].ops).verdict
    assert e1_degeneration(entries["iwasawa"].ops).verdict is False


def test_sgg(entries):
    assert sgg_check(entries["torus3"].ops).verdict is True
    with pytest.raises(WrongDimension):
        sgg_check(entries["torus2"].ops)


def test_skt_hs_examples(entries):
    rep = skt_hs_equivalence(entries["torus2"].ops, kahler_form(2))
    assert rep.solvable and rep.closed and all(b.is_zero() for b in rep.tower.ladder)
    with pytest.raises(TowerInfeasible):
        skt_hs_equivalence(entries["kodaira-thurston"].ops, kahler_form(2))
    with pytest.raises(NonRealForm):
        skt_hs_equivalence(entries["torus2"].ops, Form.monomial(2, (1,), (1,)))


@pytest.mark.parametrize("n", [2, 3])
@given(data=st.data())
@settings(max_examples=15)
def test_skt_hs_random_positive_torus(n, data, entries):
    from bottchern.positivity import is_swp
    omega = hermitian_form(n, data.draw(st.lists(gauss, min_size=n * n, max_size=n * n)))
    assert omega.is_real() and is_swp(omega).passed
    ops = entries[f"torus{n}"].ops
    rep = skt_hs_equivalence(ops, omega)
    assert rep.closed and ops.apply_d(rep.tower.assembled()).is_zero()


def test_report_json(entries):
    recs = hypothesis_chain(entries["kodaira-thurston"].ops).to_json()
    assert {r["name"] for r in recs} >= {"ddbar_manifold", "H_k", "Htilde_k", "star_k",
                                          "E1_degeneration"}
