from math import comb

import pytest
from hypothesis import given, settings

from bottchern.algebra import Form
from bottchern.cohomology import (KINDS, CohomologyTable, aeppli, bott_chern, dclosed_representative,
                                  derham, dolbeault)
from bottchern.errors import DomainError, FormNotInKernel, NoClosedRepresentative
from bottchern.harmonic import LABELS, harmonic_dims
from bottchern.induced import (compose_g, induced_I, induced_T, induced_That,
                               kernel_I_equals_image_That, valid_pk)
from bottchern.scalars import GaussRat, I
from bottchern.spectral import (degeneration_page, frolicher, frolicher_infinity,
                                infinity_page_index, is_Ek_closed)

from conftest import COFRAME_NAMES, forms, kahler_form


@pytest.fixture(scope="module")
def tables(entries):
    return {name: CohomologyTable(e.ops) for name, e in entries.items()}


def test_derham_examples(entries, tables):
    assert tables["torus2"].dim("deRham", 1) == 4
    assert tables["iwasawa"].dim("deRham", 1) == 4
    for name in COFRAME_NAMES:
        assert derham(entries[name].ops, 0).dimension == 1


def test_dolbeault_examples(entries):
    assert dolbeault(entries["torus2"].ops, 1, 1).dimension == 4
    iw = entries["iwasawa"].ops
    assert dolbeault(iw, 1, 0).dimension == 3
    assert dolbeault(iw, 0, 1).dimension == 2


def test_bc_aeppli_examples(entries):
    assert bott_chern(entries["torus2"].ops, 1, 1).dimension == 4
    assert aeppli(entries["torus2"].ops, 1, 1).dimension == 4
    iw = entries["iwasawa"].ops
    assert bott_chern(iw, 1, 1).dimension == 4
    assert aeppli(iw, 2, 2).dimension == harmonic_dims(iw, "A", 2, 2)
    for name in COFRAME_NAMES:
        ops = entries[name].ops
        assert bott_chern(ops, 0, 0).dimension == 1
    assert aeppli(entries["torus3"].ops, 3, 3).dimension == 1


@pytest.mark.parametrize("n", [2, 3])
def test_torus_binomial(n, tables):
    tab = tables[f"torus{n}"]
    assert tab.betti() == [comb(2 * n, k) for k in range(2 * n + 1)]
    for kind in KINDS[1:]:
        assert tab.hodge_table(kind) == {(p, q): comb(n, p) * comb(n, q)
                                         for p in range(n + 1) for q in range(n + 1)}


@pytest.mark.parametrize("name", COFRAME_NAMES)
def test_conjugation_symmetry(name, tables, entries):
    n = entries[name].n
    tab = tables[name]
    for kind in ("A", "BC"):
        h = tab.hodge_table(kind)
        assert all(h[(p, q)] == h[(q, p)] for p, q in h)
    # del-cohomology is the conjugate of dbar-cohomology
    assert all(tab.dim("del", p, q) == tab.dim("dbar", q, p) for p in range(n + 1) for q in range(n + 1))


@pytest.mark.parametrize("name", COFRAME_NAMES)
def test_representatives_and_projector(name, entries):
    ops = entries[name].ops
    n = ops.n
    for p in range(n + 1):
        for q in range(n + 1):
            for kind in ("BC", "A", "dbar"):
                sp = {"BC": bott_chern, "A": aeppli, "dbar": dolbeault}[kind](ops, p, q)
                for i, rep in enumerate(sp.representative_forms()):
                    coords = sp.class_of(rep)
                    assert coords == [GaussRat(int(i == j)) for j in range(sp.dimension)]


def test_class_of_examples(entries):
    sp = aeppli(entries["torus2"].ops, 1, 1)
    w = Form.monomial(2, (1,), (1,), I)
    coords = sp.class_of(w)
    assert sum(1 for c in coords if c) == 1


@given(forms(3, 0, 1), forms(3, 1, 0))
@settings(max_examples=15)
def test_modded_forms_have_zero_class(u, v):
    from bottchern import catalog
    ops = catalog.load("iwasawa").ops
    sp = aeppli(ops, 1, 1)
    assert all(not c for c in sp.class_of(ops.apply_del(u) + ops.apply_dbar(v)))
    bc = bott_chern(ops, 2, 1)
    assert all(not c for c in bc.class_of(ops.apply_del(ops.apply_dbar(v))))


def test_class_of_rejects_non_kernel(entries):
    ops = entries["iwasawa"].ops
    sp = bott_chern(ops, 1, 0)
    with pytest.raises(FormNotInKernel):
        sp.class_of(Form.phi(3, 3))


# ---------------------------------------------------------------- induced maps


def test_torus_induced_maps(entries):
    ops = entries["torus3"].ops
    for p, k in valid_pk(3):
        assert induced_That(ops, p, k).is_zero
        assert induced_I(ops, p, k).kernel().dim == 0


@pytest.mark.parametrize("name", COFRAME_NAMES)
def test_kernel_I_equals_image_That(name, entries):
    ops = entries[name].ops
    for p, k in valid_pk(ops.n):
        assert kernel_I_equals_image_That(ops, p, k)
        g = compose_g(ops, p, k)
        assert g.is_zero  # I kills the image of T_hat


def test_iwasawa_That_rank_against_oracle(entries):
    from oracle import from_coframe
    e = entries["iwasawa"]
    assert induced_That(e.ops, 1, 1).rank() == from_coframe(e.coframe).im_That_dim(1, 1)


def test_induced_T_and_range_errors(entries):
    ops = entries["iwasawa"].ops
    t = induced_T(ops, 1)
    assert t.source.label == "Aeppli(1,1)" and t.target.label == "Dolbeault-dbar(2,1)"
    with pytest.raises(DomainError):
        induced_That(ops, 1, 3)


# ---------------------------------------------------------------- Frolicher


@pytest.mark.parametrize("name", COFRAME_NAMES)
def test_frolicher_invariants(name, entries, tables):
    ops = entries[name].ops
    n = ops.n
    pages = [frolicher(ops, r) for r in range(1, infinity_page_index(n) + 1)]
    assert pages[0].dims == tables[name].hodge_table("dbar")
    for a, b in zip(pages, pages[1:]):
        assert all(b.dims[x] <= a.dims[x] for x in a.dims)
    inf = frolicher_infinity(ops)
    assert [inf.total(k) for k in range(2 * n + 1)] == tables[name].betti()


def test_frolicher_examples(entries):
    assert degeneration_page(entries["torus3"].ops) == 1
    iw = entries["iwasawa"].ops
    assert frolicher(iw, 1).dims != frolicher(iw, 2).dims
    assert degeneration_page(iw) == 2


def test_is_Ek_closed(entries):
    ops = entries["iwasawa"].ops
    a = Form.phi(3, 1)  # del- and dbar-closed
    tower = is_Ek_closed(ops, a, 3)
    assert tower is not None and all(t.is_zero() for t in tower)
    # phi^3 is dbar-closed but del phi^3 = -phi^1 phi^2 is not dbar-exact
    assert is_Ek_closed(ops, Form.phi(3, 3), 1) is None
    assert is_Ek_closed(ops, Form.phi(3, 3), 0) == []


# ---------------------------------------------------------------- d-closed representatives


def test_dclosed_representative_torus(entries):
    ops = entries["torus2"].ops
    w = kahler_form(2)
    assert dclosed_representative(ops, 1, 1, w) == w
    assert dclosed_representative(ops, 1, 1, [GaussRat(0)] * 4).is_zero()


def test_dclosed_representative_failure_on_iwasawa(entries):
    ops = entries["iwasawa"].ops
    sp = aeppli(ops, 1, 1)
    failures = 0
    for i in range(sp.dimension):
        coords = [GaussRat(int(i == j)) for j in range(sp.dimension)]
        try:
            rep = dclosed_representative(ops, 1, 1, coords)
            assert ops.apply_d(rep).is_zero()
        except NoClosedRepresentative:
            failures += 1
    assert failures > 0


# ---------------------------------------------------------------- harmonic cross-check


@pytest.mark.parametrize("name", COFRAME_NAMES)
def test_harmonic_matches_exact(name, entries, tables):
    ops = entries[name].ops
    n = ops.n
    for label in LABELS:
        for p in range(n + 1):
            for q in range(n + 1):
                assert harmonic_dims(ops, label, p, q) == tables[name].dim(label, p, q)
