"""Strict weak positivity of (p,p)-forms and the p-HS tower.

For a frame T (q x n complex matrix, rows = the covectors tau_j, q = n - p)

    Omega ^ i tau_1 ^ taubar_1 ^ ... ^ i tau_q ^ taubar_q
        = [ sum_{I,J} Omega_{IJ} W_{IJ} det T_{I^c} conj(det T_{J^c}) ] vol,

where vol = prod_j i phi^j ^ phibar^j and W_{IJ} is an exact sign/phase.
The value is divided by det(T T^*) so it depends only on the plane
ker T; with this normalisation omega^p/p! takes the value 1 everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize
from scipy.stats import norm, qmc

from .algebra import Form, OperatorSet, basis, sort_sign
from .errors import (DegenerateFrame, DomainError, InvariantViolation, NonRealForm, PreconditionFailed,
                     TowerInfeasible)
from .linalg import Matrix, block_matrix, determinant, solve
from .scalars import I, ONE, ZERO, GaussRat

DEGENERATE_GRAM = 1e-10
POSITIVE_TOL = 1e-9


def _subsets(n, k):
    return [tuple(c) for c in combinations(range(1, n + 1), k)]


def _complement(n, s):
    return tuple(i for i in range(1, n + 1) if i not in s)


@lru_cache(maxsize=None)
def weights(n: int, p: int) -> dict:
    """W_{IJ} for every monomial phi^I ^ phibar^J of bidegree (p,p)."""
    q = n - p
    vol_const = I ** n * (-1) ** (n * (n - 1) // 2)
    psi_const = I ** q * (-1) ** (q * (q - 1) // 2)
    out = {}
    for m in basis(n, p, p):
        ic, jc = _complement(n, m.holo), _complement(n, m.anti)
        s1, _ = sort_sign(m.holo + ic)
        s2, _ = sort_sign(m.anti + jc)
        sign = (-1) ** (p * q) * s1 * s2
        out[m] = psi_const * sign / vol_const
    return out


def value_matrix(form: Form, p: int) -> np.ndarray:
    """M with value(T) = D(T) M D(T)^*, D(T)_K = det T_K over q-subsets K."""
    n = form.n
    q = n - p
    ks = {k: i for i, k in enumerate(_subsets(n, q))}
    w = weights(n, p)
    M = np.zeros((len(ks), len(ks)), dtype=complex)
    for m, c in form.coeffs.items():
        if m.bidegree != (p, p):
            raise DomainError(f"form is not of bidegree ({p},{p})")
        M[ks[_complement(n, m.holo)], ks[_complement(n, m.anti)]] += complex(c * w[m])
    return M


def minors(frames: np.ndarray, q: int) -> np.ndarray:
    """det of every q x q column minor, shape (N, C(n,q)); columns in basis order."""
    n_frames, _, n = frames.shape
    if q == 0:
        return np.ones((n_frames, 1), dtype=complex)
    cols = [[i - 1 for i in k] for k in _subsets(n, q)]
    return np.stack([np.linalg.det(frames[:, :, c]) for c in cols], axis=1)


def gram(frames: np.ndarray) -> np.ndarray:
    if frames.shape[1] == 0:
        return np.ones(frames.shape[0])
    g = frames @ np.conj(np.transpose(frames, (0, 2, 1)))
    return np.real(np.linalg.det(g))


@dataclass
class GrassmannSample:
    n: int
    p: int
    frames: np.ndarray  # (N, q, n) complex
    seed: int
    n_standard: int

    @property
    def q(self) -> int:
        return self.n - self.p

    @property
    def size(self) -> int:
        return self.frames.shape[0]

    def union(self, other: "GrassmannSample") -> "GrassmannSample":
        return GrassmannSample(self.n, self.p, np.concatenate([self.frames, other.frames]),
                               self.seed, self.n_standard)


def standard_frames(n: int, p: int) -> np.ndarray:
    q = n - p
    out = []
    for k in _subsets(n, q):
        t = np.zeros((q, n), dtype=complex)
        for row, j in enumerate(k):
            t[row, j - 1] = 1.0
        out.append(t)
    return np.array(out).reshape(len(out), q, n)


def grassmann_sample(n: int, p: int, size: int = 2000, seed: int = 0) -> GrassmannSample:
    """All C(n, n-p) coordinate frames plus scrambled-Halton Gaussian frames."""
    if not 1 <= p <= n:
        raise DomainError(f"plane dimension {p} out of range for n={n}")
    q = n - p
    std = standard_frames(n, p)
    extra = max(size - len(std), 0)
    if q == 0 or extra == 0:
        return GrassmannSample(n, p, std, seed, len(std))
    pts = qmc.Halton(d=2 * q * n, scramble=True, seed=seed).random(extra)
    z = norm.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
    frames = (z[:, : q * n] + 1j * z[:, q * n:]).reshape(extra, q, n)
    return GrassmannSample(n, p, np.concatenate([std, frames]), seed, len(std))


def frame_values(form: Form, p: int, sample: GrassmannSample) -> tuple[np.ndarray, np.ndarray]:
    """(normalised values, mask of non-degenerate frames)."""
    D = minors(sample.frames, sample.q)
    M = value_matrix(form, p)
    raw = np.real(np.einsum("na,ab,nb->n", D, M, np.conj(D)))
    g = gram(sample.frames)
    ok = g > DEGENERATE_GRAM
    vals = np.full(raw.shape, np.nan)
    vals[ok] = raw[ok] / g[ok]
    return vals, ok


def functional_rows(forms: list[Form], p: int, sample: GrassmannSample) -> np.ndarray:
    """Row f, column j: normalised value of forms[j] on frame f (degenerate frames dropped)."""
    D = minors(sample.frames, sample.q)
    g = gram(sample.frames)
    ok = g > DEGENERATE_GRAM
    D = D[ok]
    cols = []
    for f in forms:
        M = value_matrix(f, p)
        cols.append(np.real(np.einsum("na,ab,nb->n", D, M, np.conj(D))) / g[ok])
    if not cols:
        return np.zeros((int(ok.sum()), 0))
    return np.stack(cols, axis=1)


def _pp_degree(form: Form) -> int:
    bd = form.bidegree
    if bd is None or bd[0] != bd[1]:
        raise DomainError("expected a pure (p,p)-form")
    return bd[0]


def _frame_objective(M: np.ndarray, q: int, n: int):
    def f(x):
        t = (x[: q * n] + 1j * x[q * n:]).reshape(1, q, n)
        g = gram(t)[0]
        if g <= DEGENERATE_GRAM:
            return 1e6
        d = minors(t, q)[0]
        return float(np.real(d @ M @ np.conj(d))) / g
    return f


def polish(form: Form, p: int, frames: np.ndarray, starts: int = 4) -> tuple[float, np.ndarray]:
    """Local minimisation of the normalised value from the worst given frames."""
    n, q = form.n, form.n - p
    if q == 0 or len(frames) == 0:
        return float("inf"), frames[:0]
    M = value_matrix(form, p)
    f = _frame_objective(M, q, n)
    vals = np.array([f(np.concatenate([t.ravel().real, t.ravel().imag])) for t in frames])
    best_val, best = float("inf"), frames[:1]
    for idx in np.argsort(vals)[:starts]:
        t = frames[idx]
        x0 = np.concatenate([t.ravel().real, t.ravel().imag])
        res = minimize(f, x0, method="BFGS", options={"maxiter": 200, "gtol": 1e-10})
        x = res.x if res.fun < vals[idx] else x0
        val = min(res.fun, vals[idx])
        if val < best_val:
            best_val = val
            best = (x[: q * n] + 1j * x[q * n:]).reshape(1, q, n)
    return float(best_val), best


@dataclass
class MarginReport:
    margin: float
    skipped: int
    worst_frame: np.ndarray


def sampled_margin(form: Form, sample: GrassmannSample, refine: bool = True) -> MarginReport:
    """Minimum normalised value over the non-degenerate frames of the sample.

    With ``refine`` the worst frames seed a local minimisation, so the margin
    approaches the true minimum over the Grassmannian from above.
    """
    if not form.is_real():
        raise NonRealForm("strict weak positivity needs a real form")
    p = _pp_degree(form) if not form.is_zero() else sample.p
    if p != sample.p:
        raise DomainError(f"sample is for p={sample.p}, form has p={p}")
    vals, ok = frame_values(form, p, sample)
    skipped = int((~ok).sum())
    if not ok.any():
        raise DegenerateFrame("every frame of the sample is degenerate")
    good = sample.frames[ok]
    i = int(np.argmin(vals[ok]))
    margin, worst = float(vals[ok][i]), good[i: i + 1]
    if refine:
        m2, w2 = polish(form, p, good)
        if m2 < margin:
            margin, worst = m2, w2
    return MarginReport(margin, skipped, worst)


def hermitian_matrix(form: Form, p: int) -> Matrix:
    """Exact Hermitian coefficient matrix for p in {1, n-1, n}.

    p = 1:   H_{jk} = -i Omega_{jk}                 (Omega = sum Omega_jk phi^j ^ phibar^k)
    p = n-1: H_{ab} = value-matrix entry on the single-covector minors
    p = n:   1 x 1 matrix, the coefficient over vol.
    """
    n = form.n
    if p == 1:
        rows = [[ZERO] * n for _ in range(n)]
        for m, c in form.coeffs.items():
            rows[m.holo[0] - 1][m.anti[0] - 1] = c * GaussRat(0, -1)
        return Matrix.from_rows(rows, n)
    if p in (n - 1, n):
        q = n - p
        ks = {k: i for i, k in enumerate(_subsets(n, q))}
        w = weights(n, p)
        size = len(ks)
        rows = [[ZERO] * size for _ in range(size)]
        for m, c in form.coeffs.items():
            rows[ks[_complement(n, m.holo)]][ks[_complement(n, m.anti)]] = c * w[m]
        return Matrix.from_rows(rows, size)
    raise DomainError(f"no exact eigenvalue test for p={p}, n={n}")


def sylvester_positive(h: Matrix) -> bool:
    """Hermitian positive definiteness via leading principal minors (exact)."""
    rows = h.tolist()
    size = len(rows)
    for k in range(1, size + 1):
        sub = Matrix.from_rows([r[:k] for r in rows[:k]], k)
        det = determinant(sub)
        if det.im != 0:
            raise NonRealForm("leading minor is not real: matrix is not Hermitian")
        if det.re <= 0:
            return False
    return True


@dataclass
class SwpResult:
    margin: float
    passed: bool
    exact: bool | None = None  # exact eigenvalue verdict, p in {1, n-1, n}
    skipped: int = 0
    sample_size: int = 0

    def to_json(self) -> dict:
        return {"margin": self.margin, "passed": self.passed, "exact": self.exact,
                "skipped_frames": self.skipped, "sample_size": self.sample_size}


def is_swp(form: Form, sample: GrassmannSample | None = None, p: int | None = None) -> SwpResult:
    """Strict weak positivity.

    Exact (Sylvester) for p in {1, n-1, n} with the minimum eigenvalue as margin;
    otherwise the minimum normalised value over the sample.
    """
    if not form.is_real():
        raise NonRealForm("strict weak positivity needs a real form")
    n = form.n
    if p is None:
        p = _pp_degree(form) if not form.is_zero() else (sample.p if sample else None)
    if p is None:
        raise DomainError("cannot infer p for the zero form without a sample")
    if p in (1, n - 1, n):
        h = hermitian_matrix(form, p)
        exact = sylvester_positive(h)
        eig = np.linalg.eigvalsh(h.to_numpy()) if h.nrows else np.array([0.0])
        return SwpResult(float(eig.min()), exact, exact, 0, 0)
    if sample is None:
        raise DomainError(f"p={p} needs a Grassmann sample")
    rep = sampled_margin(form, sample)
    return SwpResult(rep.margin, bool(rep.margin > POSITIVE_TOL), None, rep.skipped, sample.size)


def kahler_power(n: int, p: int) -> Form:
    """(i sum phi^j ^ phibar^j)^p / p!."""
    omega = Form.zero(n, (1, 1))
    for j in range(1, n + 1):
        omega = omega + Form.monomial(n, (j,), (j,), I)
    out = Form(n, {basis(n, 0, 0)[0]: ONE}, (0, 0))
    fact = 1
    for k in range(1, p + 1):
        out = out ^ omega
        fact *= k
    return out * GaussRat(Fraction(1, fact))


# ----------------------------------------------------------------------------
# p-HS tower


@dataclass
class TowerSolution:
    """ladder[k-1] = alpha^{p+k,p-k}; alpha[i] = alpha^{i,2p-i} = conj(ladder[p-i-1])."""

    p: int
    omega: Form
    ladder: list
    verified: bool = False

    @property
    def alpha(self) -> dict:
        return {i: self.ladder[self.p - i - 1].conjugate() for i in range(self.p)}

    def assembled(self) -> Form:
        out = self.omega
        for b in self.ladder:
            out = out + b + b.conjugate()
        return out

    def to_json(self) -> dict:
        return {"p": self.p, "ladder": [b.to_json() for b in self.ladder],
                "verified": self.verified}


def _in_range(ops, a, b):
    return 0 <= a <= ops.n and 0 <= b <= ops.n


def tower_system(ops: OperatorSet, p: int):
    """Coupled system in the ladder unknowns beta_k in Lambda^{p+k,p-k}, k = 1..p.

    Rows: delbar beta_1 (= -del Omega), del beta_{k-1} + delbar beta_k (= 0),
    del beta_p (= 0).  Returns (matrix, var bidegrees, var dims, eq dims).
    """
    var_bd = [(p + k, p - k) for k in range(1, p + 1)]
    var_dims = [ops.dim(*bd) if _in_range(ops, *bd) else 0 for bd in var_bd]
    eq_bd = [(p + k, p - k + 1) for k in range(1, p + 1)] + [(2 * p + 1, 0)]
    eq_dims = [ops.dim(*bd) if _in_range(ops, *bd) else 0 for bd in eq_bd]
    blocks = {}
    for k in range(p):
        if var_dims[k] and eq_dims[k]:
            blocks[(k, k)] = ops.dbar(*var_bd[k])
        if var_dims[k] and eq_dims[k + 1]:
            blocks[(k + 1, k)] = ops.del_(*var_bd[k])
    return block_matrix(eq_dims, var_dims, blocks), var_bd, var_dims, eq_dims


def solve_hs_tower(ops: OperatorSet, omega: Form) -> TowerSolution:
    """Solve (E_1)..(E_p) and del alpha^{2p,0} = 0 as one linear system."""
    p = _pp_degree(omega) if not omega.is_zero() else None
    if p is None:
        return TowerSolution(0, omega, [], True)
    vec = omega.to_vector(p, p)
    if ops.ddbar(p, p).apply(vec):
        raise PreconditionFailed("del delbar Omega != 0")
    big, var_bd, var_dims, eq_dims = tower_system(ops, p)
    rhs = {}
    if eq_dims[0]:
        rhs = {i: -x for i, x in ops.del_(p, p).apply(vec).items()}
    sol = solve(big, rhs)
    if sol is None:
        r = big.rank()
        aug = Matrix(big.nrows, big.ncols + 1, list(big.columns) + [rhs]).rank()
        raise TowerInfeasible(
            f"coupled tower system unsolvable: rank {r} < augmented rank {aug}",
            certificate={"rank": r, "augmented_rank": aug, "unknowns": big.ncols})
    ladder, off = [], 0
    for bd, d in zip(var_bd, var_dims):
        if d:
            ladder.append(Form.from_vector(ops.n, *bd, {i - off: x for i, x in sol.items()
                                                         if off <= i < off + d}))
        else:
            ladder.append(Form.zero(ops.n))
        off += d
    tower = TowerSolution(p, omega, ladder)
    if omega.is_real() and not ops.apply_d(tower.assembled()).is_zero():
        raise InvariantViolation("assembled 2p-form failed the exact closedness check")
    tower.verified = omega.is_real()
    return tower
