"""Wave-operator series and inverse-scattering probes.

The nonlinear walk U(t)u0 deviates from its linear part through the
interaction-picture series

    W* u0 = u0 + sum_{t >= 0} U0^{-t} (C_N - I) U(t) u0,

whose terms are pointwise quintic (or higher) in the amplitude for the
families handled here.  The series is accumulated in the forward frame
G <- U0 (G + d_t) with a Kahan carry propagated through the unitary step,
then rotated back once; every intermediate quantity is of the size of the
terms themselves, so no near-equal states are ever subtracted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .coins import (
    CoinSpec,
    coin_kernel,
    linear_part,
    nonlinear_partial_derivatives,
    require_unitary,
)
from .evolution import linear_step, linear_step_inverse
from .state import LatticeState, combine, delta_state, inner_product, l2_distance

__all__ = [
    "NonConvergenceError",
    "ScatteringReport",
    "RecoveryResult",
    "RecoveryReport",
    "scattering_series",
    "l5_decay_check",
    "wave_operator",
    "nonlinear_residual",
    "dlambda",
    "recovery_probe",
    "recover_derivatives",
    "recovery_ladder",
]


class NonConvergenceError(RuntimeError):
    """Raised when a series fails its stopping rule within the horizon."""


def _check_linear_part(spec: CoinSpec, c0: np.ndarray) -> np.ndarray:
    c0 = require_unitary(c0, "c0")
    if np.max(np.abs(linear_part(spec) - c0)) > 1e-12:
        raise ValueError("c0 must equal the linear part of the coin spec")
    return c0


@dataclass
class _SeriesRun:
    residual: LatticeState
    tail_norms: np.ndarray
    horizon_used: int
    stopped_early: bool
    state_snapshots: dict[int, LatticeState]


def _series_run(
    u0: LatticeState,
    spec: CoinSpec,
    c0: np.ndarray,
    t_max: int,
    tol: float,
    snapshot_times: tuple[int, ...] = (),
) -> _SeriesRun:
    """Nonlinear evolution with simultaneous series accumulation.

    Runs up to t_max terms; with tol > 0 stops at the first t >= 64 whose
    trailing 32 term norms sum below tol (raising NonConvergenceError if
    that never happens).  tol = 0 always uses the full horizon.
    """
    if t_max < 1:
        raise ValueError("t_max must be positive")
    c0 = _check_linear_part(spec, c0)
    kern = coin_kernel(spec)
    m = c0  # linear coin entries
    m00, m01, m10, m11 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    h = c0.conj().T
    h00, h01, h10, h11 = h[0, 0], h[0, 1], h[1, 0], h[1, 1]

    n0 = len(u0)
    size = n0 + 4 * t_max + 6
    off = 2 * t_max + 3
    u1 = np.zeros(size, dtype=np.complex128)
    u2 = np.zeros(size, dtype=np.complex128)
    g1 = np.zeros(size, dtype=np.complex128)
    g2 = np.zeros(size, dtype=np.complex128)
    k1 = np.zeros(size, dtype=np.complex128)
    k2 = np.zeros(size, dtype=np.complex128)
    lo, hi = off, off + n0
    u1[lo:hi] = u0.amplitudes[:, 0]
    u2[lo:hi] = u0.amplitudes[:, 1]
    base = u0.origin - off

    snaps: dict[int, LatticeState] = {}
    want_snap = set(snapshot_times)

    def snap(t: int, lo: int, hi: int) -> None:
        if t in want_snap:
            snaps[t] = LatticeState(
                base + lo, np.column_stack([u1[lo:hi], u2[lo:hi]]).copy()
            )

    snap(0, lo, hi)
    tails: list[float] = []
    stopped = False
    for t in range(t_max):
        a1 = u1[lo:hi]
        a2 = u2[lo:hi]
        w1, w2 = kern(a1, a2)
        # series term d_t = C0^{-1} (C(u) - C0) u, with the difference taken
        # in the coin output frame: when the coin has no intensity-dependent
        # part the two multiplications share every operation, so the defect
        # is exactly zero rather than rounding noise
        e1 = w1 - (m00 * a1 + m01 * a2)
        e2 = w2 - (m10 * a1 + m11 * a2)
        d1 = h00 * e1 + h01 * e2
        d2 = h10 * e1 + h11 * e2
        tails.append(
            float(
                np.sqrt(
                    np.sum(d1.real**2 + d1.imag**2 + d2.real**2 + d2.imag**2)
                )
            )
        )
        # Kahan add of d_t into the forward-frame accumulator
        y1 = d1 - k1[lo:hi]
        y2 = d2 - k2[lo:hi]
        t1 = g1[lo:hi] + y1
        t2 = g2[lo:hi] + y2
        k1[lo:hi] = (t1 - g1[lo:hi]) - y1
        k2[lo:hi] = (t2 - g2[lo:hi]) - y2
        g1[lo:hi] = t1
        g2[lo:hi] = t2
        # one linear step of accumulator and carry: G <- U0 G, K <- U0 K
        for z1, z2 in ((g1, g2), (k1, k2)):
            b1 = m00 * z1[lo:hi] + m01 * z2[lo:hi]
            b2 = m10 * z1[lo:hi] + m11 * z2[lo:hi]
            z1[lo - 1 : hi - 1] = b1
            z1[hi - 1] = 0.0
            z2[lo + 1 : hi + 1] = b2
            z2[lo] = 0.0
        # nonlinear step of the walk itself reuses the coin output
        u1[lo - 1 : hi - 1] = w1
        u1[hi - 1] = 0.0
        u2[lo + 1 : hi + 1] = w2
        u2[lo] = 0.0
        lo -= 1
        hi += 1
        snap(t + 1, lo, hi)
        if tol > 0.0 and t + 1 >= 64 and sum(tails[-32:]) < tol:
            stopped = True
            break

    if tol > 0.0 and not stopped:
        raise NonConvergenceError(
            f"series tails did not fall below {tol} within {t_max} terms"
        )

    terms = len(tails)
    # rotate the accumulated sum back: N = U0^{-terms} G
    for _ in range(terms):
        c1 = g1[lo:hi].copy()
        c2 = g2[lo:hi].copy()
        g1[lo + 1 : hi + 1] = c1
        g1[lo] = 0.0
        g2[lo - 1 : hi - 1] = c2
        g2[hi - 1] = 0.0
        lo -= 1
        hi += 1
        s1 = g1[lo:hi]
        s2 = g2[lo:hi]
        r1 = h00 * s1 + h01 * s2
        r2 = h10 * s1 + h11 * s2
        g1[lo:hi] = r1
        g2[lo:hi] = r2

    residual = LatticeState(base + lo, np.column_stack([g1[lo:hi], g2[lo:hi]]))
    return _SeriesRun(
        residual=residual,
        tail_norms=np.asarray(tails),
        horizon_used=terms,
        stopped_early=stopped,
        state_snapshots=snaps,
    )


def nonlinear_residual(
    u0: LatticeState,
    spec: CoinSpec,
    c0: np.ndarray,
    tol: float = 0.0,
    t_max: int = 2048,
    exponent_variant: str = "theorem",
) -> LatticeState:
    """Series value W* u0 - u0, accumulated directly from its terms.

    Never computed as a difference of near-equal states: each term is built
    pointwise from the intensity factor and added into the running frame.
    exponent_variant "proof" applies one extra inverse linear step to the
    whole sum (the off-by-one alternative indexing of the series).
    """
    if exponent_variant not in ("theorem", "proof"):
        raise ValueError("exponent_variant must be 'theorem' or 'proof'")
    run = _series_run(u0, spec, c0, t_max, tol)
    res = run.residual
    if exponent_variant == "proof":
        res = linear_step_inverse(res, c0)
    return res


def wave_operator(
    u0: LatticeState,
    spec: CoinSpec,
    c0: np.ndarray,
    tol: float = 1e-7,
    t_max: int = 4096,
    exponent_variant: str = "theorem",
) -> LatticeState:
    """Asymptotic profile W* u0 = u0 + (series), sharing the accumulation
    path of nonlinear_residual bit for bit."""
    res = nonlinear_residual(u0, spec, c0, tol, t_max, exponent_variant)
    return combine([(1.0, u0), (1.0, res)])


@dataclass
class ScatteringReport:
    """Series diagnostics of one nonlinear run.

    tail_norms[t] is the l2 norm of the t-th series term (invariant under
    the unitary rotation, so available without rotating back).  defect[i]
    is ||U(t_i) u0 - U0^{t_i} u_plus||_2 at the sampled times.  converged
    is set when the final decade of term norms sums below the tolerance.
    """

    u_plus: LatticeState
    tail_norms: np.ndarray
    defect_times: np.ndarray
    defect_series: np.ndarray
    horizon: int
    converged: bool
    tolerance: float


def _default_defect_times(horizon: int) -> np.ndarray:
    pts = set(np.round(np.geomspace(1, horizon, 17)).astype(int).tolist())
    d = 10
    while d <= horizon:
        pts.add(d)
        d *= 10
    pts.add(horizon)
    return np.asarray(sorted(p for p in pts if 1 <= p <= horizon), dtype=np.int64)


def scattering_series(
    u0: LatticeState,
    spec: CoinSpec,
    c0: np.ndarray,
    horizon: int,
    defect_times: np.ndarray | None = None,
    tol: float = 1e-5,
) -> ScatteringReport:
    """Accumulate `horizon` series terms and measure the defect against the
    linear evolution of the extracted profile at log-spaced times."""
    times = (
        _default_defect_times(horizon)
        if defect_times is None
        else np.asarray(sorted(set(int(t) for t in defect_times)), dtype=np.int64)
    )
    if times.size and (times[0] < 1 or times[-1] > horizon):
        raise ValueError("defect times must lie in [1, horizon]")
    run = _series_run(u0, spec, c0, horizon, 0.0, tuple(int(t) for t in times))
    u_plus = combine([(1.0, u0), (1.0, run.residual)])

    defects = np.zeros(times.size)
    v = u_plus
    next_i = 0
    for t in range(1, int(times[-1]) + 1 if times.size else 0):
        v = linear_step(v, c0)
        if next_i < times.size and t == int(times[next_i]):
            defects[next_i] = l2_distance(run.state_snapshots[t], v)
            next_i += 1

    last_decade = run.tail_norms[run.horizon_used // 10 :]
    converged = bool(np.sum(last_decade) < tol)
    return ScatteringReport(
        u_plus=u_plus,
        tail_norms=run.tail_norms,
        defect_times=times,
        defect_series=defects,
        horizon=run.horizon_used,
        converged=converged,
        tolerance=tol,
    )


def l5_decay_check(u0: LatticeState, spec: CoinSpec, horizon: int) -> np.ndarray:
    """Series <t>^{4/15} ||u(t)||_{l5} for the nonlinear evolution,
    <t> = sqrt(1 + t^2); bounded for small data."""
    from .evolution import Recorder, evolve

    traj = evolve(u0, spec, horizon, Recorder(lp=(5.0,)))
    t = np.arange(horizon + 1, dtype=np.float64)
    return (1.0 + t * t) ** (2.0 / 15.0) * traj.series["lp_5"]


def dlambda(gfun, lam: float):
    """Scaled difference (g(2 lambda) - g(lambda)) / lambda.

    Annihilates constants and maps lambda -> 1, which is what isolates the
    two columns of the derivative matrices in the recovery assembly.
    """
    if not (lam > 0):
        raise ValueError("lambda must be positive")
    ga = np.asarray(gfun(2.0 * lam))
    gb = np.asarray(gfun(lam))
    out = (ga - gb) / lam
    return complex(out) if out.ndim == 0 else out


_PROBE_LAMBDA_MAX = 0.8


def _probe_w0(lam: float, row: int) -> LatticeState:
    if row == 1:
        return combine(
            [(lam**2, delta_state(1, 0)), (lam**3, delta_state(2, 0))]
        )
    return combine([(lam**3, delta_state(1, 0)), (lam**2, delta_state(2, 0))])


def _probe_pair(
    spec: CoinSpec,
    c0: np.ndarray,
    lam: float,
    row: int,
    t_max: int,
    exponent_variant: str,
) -> tuple[complex, complex]:
    """Both pairings <(W* - U0^{-1} W* U0) w0, delta_{j,0}> for j = 1, 2,
    scaled by lambda^{-10}.

    The conjugated-minus-plain orientation matters: the series for
    W* - U0^{-1} W* U0 telescopes to the single t = 0 defect term, so the
    pairing converges to <(C_hat - I) w0, delta_{j,0}> as lambda -> 0. The
    opposite orientation converges to its negative.
    """
    w0 = _probe_w0(lam, row)
    n_shift = nonlinear_residual(
        linear_step(w0, c0), spec, c0, 0.0, t_max, exponent_variant
    )
    n_base = nonlinear_residual(w0, spec, c0, 0.0, t_max, exponent_variant)
    diff = combine([(1.0, n_base), (-1.0, linear_step_inverse(n_shift, c0))])
    scale = lam**-10
    return (
        scale * inner_product(diff, delta_state(1, 0)),
        scale * inner_product(diff, delta_state(2, 0)),
    )


def _check_probe_args(spec: CoinSpec, lam: float, row: int, j: int) -> None:
    nonlinear_partial_derivatives(spec)  # raises unless quintic structure
    if not (0.0 < lam <= _PROBE_LAMBDA_MAX):
        raise ValueError(f"lambda must lie in (0, {_PROBE_LAMBDA_MAX}]")
    if row not in (1, 2) or j not in (1, 2):
        raise ValueError("row and j must be 1 or 2")


def recovery_probe(
    spec: CoinSpec,
    c0: np.ndarray,
    lam: float,
    row: int,
    j: int,
    t_max: int = 2048,
    exponent_variant: str = "theorem",
) -> complex:
    """Scattering probe L_{row,j}(lambda) = lambda^{-10}
    <(W* - U0^{-1} W* U0) w0, delta_{j,0}> with w0 the row-specific
    two-site seed lambda^2 delta_1 + lambda^3 delta_2 (rows swapped for 2)."""
    _check_probe_args(spec, lam, row, j)
    pair = _probe_pair(spec, c0, lam, row, t_max, exponent_variant)
    return pair[j - 1]


@dataclass
class RecoveryResult:
    """Assembled derivative estimates at one ladder rung.

    probes_lam[r-1][j-1] holds L_{rj}(lambda); m1 and m2 approximate the
    partial derivatives of the squared-intensity factor at zero, with
    errors measured in the operator 2-norm against the exact values.
    """

    lam: float
    probes_lam: np.ndarray
    probes_2lam: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    truth1: np.ndarray
    truth2: np.ndarray
    error1: float
    error2: float

    @property
    def error(self) -> float:
        return max(self.error1, self.error2)


def _assemble(
    lam: float, l_lam: np.ndarray, l_2lam: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    d = (l_2lam - l_lam) / lam
    m1 = np.array(
        [
            [l_lam[0, 0] - lam * d[0, 0], d[0, 0]],
            [l_lam[0, 1] - lam * d[0, 1], d[0, 1]],
        ],
        dtype=np.complex128,
    )
    m2 = np.array(
        [
            [d[1, 0], l_lam[1, 0] - lam * d[1, 0]],
            [d[1, 1], l_lam[1, 1] - lam * d[1, 1]],
        ],
        dtype=np.complex128,
    )
    return m1, m2


def _probe_matrix(
    spec: CoinSpec,
    c0: np.ndarray,
    lam: float,
    t_max: int,
    exponent_variant: str,
    cache: dict[float, np.ndarray] | None = None,
) -> np.ndarray:
    """All four probes at one lambda as a (row, j) matrix."""
    if cache is not None and lam in cache:
        return cache[lam]
    out = np.empty((2, 2), dtype=np.complex128)
    for row in (1, 2):
        p1, p2 = _probe_pair(spec, c0, lam, row, t_max, exponent_variant)
        out[row - 1, 0] = p1
        out[row - 1, 1] = p2
    if cache is not None:
        cache[lam] = out
    return out


def _op_norm(m: np.ndarray) -> float:
    return float(np.linalg.svd(m, compute_uv=False)[0])


def recover_derivatives(
    spec: CoinSpec,
    c0: np.ndarray,
    lam: float,
    t_max: int = 2048,
    exponent_variant: str = "theorem",
    _cache: dict[float, np.ndarray] | None = None,
) -> RecoveryResult:
    """Estimate both partial derivatives of the squared-intensity factor at
    zero from probes at lambda and 2 lambda; errors are O(lambda^3)."""
    _check_probe_args(spec, lam, 1, 1)
    if not (2.0 * lam <= _PROBE_LAMBDA_MAX):
        raise ValueError("need 2*lambda within the probe domain")
    l_lam = _probe_matrix(spec, c0, lam, t_max, exponent_variant, _cache)
    l_2lam = _probe_matrix(spec, c0, 2.0 * lam, t_max, exponent_variant, _cache)
    m1, m2 = _assemble(lam, l_lam, l_2lam)
    t1, t2 = nonlinear_partial_derivatives(spec)
    return RecoveryResult(
        lam=lam,
        probes_lam=l_lam,
        probes_2lam=l_2lam,
        m1=m1,
        m2=m2,
        truth1=t1,
        truth2=t2,
        error1=_op_norm(m1 - t1),
        error2=_op_norm(m2 - t2),
    )


@dataclass
class RecoveryReport:
    """Ladder of recovery results with the fitted error order in lambda."""

    lams: list[float]
    results: list[RecoveryResult]
    fitted_order: float
    fit_residual_rms: float
    t_max: int
    exponent_variant: str

    @property
    def errors(self) -> np.ndarray:
        return np.asarray([r.error for r in self.results])


def recovery_ladder(
    spec: CoinSpec,
    c0: np.ndarray,
    lams: tuple[float, ...] = (0.2, 0.1, 0.05),
    t_max: int = 2048,
    exponent_variant: str = "theorem",
) -> RecoveryReport:
    """Run recover_derivatives down a lambda ladder, sharing probes between
    rungs (the 2 lambda probes of one rung are the lambda probes of the rung
    above), and fit the error order in lambda.

    A zero nonlinearity yields exactly zero errors, which cannot be fit;
    the order is reported as inf in that case.
    """
    lams = tuple(float(x) for x in lams)
    if len(lams) < 2:
        raise ValueError("ladder needs at least two rungs")
    if any(not (0 < x) for x in lams):
        raise ValueError("ladder values must be positive")
    cache: dict[float, np.ndarray] = {}
    results = [
        recover_derivatives(spec, c0, lam, t_max, exponent_variant, cache)
        for lam in lams
    ]
    errs = np.asarray([r.error for r in results])
    if np.all(errs > 0):
        lx = np.log10(np.asarray(lams))
        ly = np.log10(errs)
        order, _ = np.polyfit(lx, ly, 1)
        resid = ly - np.polyval(np.polyfit(lx, ly, 1), lx)
        rms = float(np.sqrt(np.mean(resid**2)))
    else:
        order, rms = np.inf, 0.0
    return RecoveryReport(
        lams=list(lams),
        results=results,
        fitted_order=float(order),
        fit_residual_rms=rms,
        t_max=t_max,
        exponent_variant=exponent_variant,
    )
