"""Derivative-free search over Gaussian error-correcting codes.

The search tries to find a code whose corrected channel has a smaller
entanglement degradation than the bare channel. It never should; a hit is
reported as ``violated`` and treated as a failure by the CLI and tests.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import channels as ch
from .entanglement import INF, entanglement_degradation
from .gecc import GECCode, effective_channel
from .symplectic import NumericalError, passive_symplectic, squeezing_layer

log = logging.getLogger(__name__)

R_MAX = 3.0
N_MAX = 4
VIOLATION_TOL = 1e-6
N_STARTS = 5
METHODS = ("random", "nelder-mead-multistart")

# objective handed to the optimizer for failed evaluations; any real D is <= 1
_FAILED = 2.0


def passive_size(n):
    """Parameters of one passive factor: beam-splitter angles and phases, then output phases."""
    return n * (n - 1) + n


def symplectic_size(n):
    return 2 * passive_size(n) + n


def passive_unitary(params, n):
    """Reck-style mesh: beam splitters on every pair ``i < j``, then output phases."""
    params = np.asarray(params, dtype=float)
    m = n * (n - 1) // 2
    thetas, phis, outs = params[:m], params[m : 2 * m], params[2 * m :]
    cos, sin, ph = np.cos(thetas), np.sin(thetas), np.exp(1j * phis)
    ec, es = (ph * cos).tolist(), (ph * sin).tolist()
    cos, sin = cos.tolist(), sin.tolist()
    u = np.eye(n, dtype=complex)
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            ui, uj = u[i].copy(), u[j].copy()
            u[i] = ec[k] * ui - sin[k] * uj
            u[j] = es[k] * ui + cos[k] * uj
            k += 1
    return np.exp(1j * outs)[:, None] * u


def symplectic_from_params(params, n, r_max=R_MAX):
    """Bloch-Messiah composition ``K1 Z K2`` from a flat parameter vector."""
    params = np.asarray(params, dtype=float)
    if params.size != symplectic_size(n):
        raise ValueError(f"expected {symplectic_size(n)} parameters for n={n}, got {params.size}")
    if not np.all(np.isfinite(params)):
        raise ValueError("code parameters must be finite")
    p = passive_size(n)
    squeeze = params[p : p + n]
    if np.any(np.abs(squeeze) > r_max):
        raise ValueError(f"squeezing {np.abs(squeeze).max():.3f} exceeds r_max={r_max}")
    k1 = passive_symplectic(passive_unitary(params[:p], n))
    k2 = passive_symplectic(passive_unitary(params[p + n :], n))
    return k1 @ squeezing_layer(squeeze) @ k2


@dataclass(frozen=True, eq=False)
class CodeParameterization:
    n: int
    encoder_params: np.ndarray
    decoder_params: np.ndarray
    r_max: float = R_MAX

    @classmethod
    def zeros(cls, n, r_max=R_MAX):
        size = symplectic_size(n)
        return cls(n, np.zeros(size), np.zeros(size), r_max)

    @classmethod
    def from_vector(cls, vec, n, r_max=R_MAX):
        vec = np.asarray(vec, dtype=float)
        size = symplectic_size(n)
        return cls(n, vec[:size].copy(), vec[size:].copy(), r_max)

    @classmethod
    def random(cls, n, rng, r_max=R_MAX):
        return cls.from_vector(_random_vector(n, rng, r_max), n, r_max)

    def vector(self):
        return np.concatenate([self.encoder_params, self.decoder_params])


def _squeeze_mask(n):
    mask = np.zeros(symplectic_size(n), dtype=bool)
    p = passive_size(n)
    mask[p : p + n] = True
    return np.concatenate([mask, mask])


def _random_vector(n, rng, r_max):
    mask = _squeeze_mask(n)
    vec = rng.uniform(0.0, 2 * np.pi, size=mask.size)
    vec[mask] = rng.uniform(-r_max, r_max, size=int(mask.sum()))
    return vec


def realize(params):
    """Builds the encoder and decoder symplectics described by ``params``."""
    s_e = symplectic_from_params(params.encoder_params, params.n, params.r_max)
    s_d = symplectic_from_params(params.decoder_params, params.n, params.r_max)
    return GECCode(params.n, s_e, s_d)


def objective(params, channel):
    """Entanglement degradation of ``channel`` corrected by the realised code."""
    code = realize(params)
    return entanglement_degradation(effective_channel(code, channel, check=False)).D


@dataclass
class SearchResult:
    best_params: CodeParameterization
    best_D: float
    baseline_D: float
    evaluations: int
    seed: int
    method: str
    violated: bool
    skipped: int = 0
    best_det_N_GC: float = float("nan")
    best_det_M_GC: float = float("nan")
    trace: list = field(default_factory=list, repr=False)

    @property
    def skipped_fraction(self):
        return self.skipped / max(self.evaluations, 1)


class _BudgetExhausted(Exception):
    pass


class _Evaluator:
    """Counts evaluations against a budget and remembers the best point."""

    def __init__(self, channel, n, r_max, budget):
        self.channel = channel
        self.n = n
        self.r_max = r_max
        self.budget = budget
        self.count = 0
        self.skipped = 0
        self.trace = []
        self.best = (INF, None)

    def __call__(self, vec):
        if self.count >= self.budget:
            raise _BudgetExhausted
        self.count += 1
        vec = np.asarray(vec, dtype=float)
        params = CodeParameterization.from_vector(vec, self.n, self.r_max)
        try:
            with np.errstate(over="raise", invalid="raise", divide="raise"):
                value = objective(params, self.channel)
        except (ch.InvalidChannelError, NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
            self.skipped += 1
            log.debug("evaluation %d skipped: %s", self.count, exc)
            self.trace.append(float("nan"))
            return _FAILED
        self.trace.append(value)
        if value < self.best[0]:
            self.best = (value, vec.copy())
        return value


def _clipped(fun, mask, r_max):
    def wrapped(vec):
        vec = np.array(vec, dtype=float)
        vec[mask] = np.clip(vec[mask], -r_max, r_max)
        return fun(vec)

    return wrapped


def _local_refine(channel, n, r_max, start, budget, step=0.3):
    """Nelder-Mead from ``start`` with its own evaluation budget."""
    ev = _Evaluator(channel, n, r_max, budget)
    if budget <= 0:
        return ev
    mask = _squeeze_mask(n)
    dim = start.size
    simplex = np.vstack([start] + [start + step * np.eye(dim)[i] for i in range(dim)])
    try:
        minimize(
            _clipped(ev, mask, r_max),
            start,
            method="Nelder-Mead",
            options={
                "maxfev": budget,
                "initial_simplex": simplex,
                "xatol": 1e-10,
                "fatol": 1e-14,
            },
        )
    except _BudgetExhausted:
        pass
    return ev


def search(
    channel,
    n,
    budget,
    seed,
    method="nelder-mead-multistart",
    r_max=R_MAX,
    n_max=N_MAX,
    n_starts=N_STARTS,
    workers=1,
):
    """Searches codes on ``n`` modes for a lower entanglement degradation than ``channel``'s.

    The zero-parameter (identity) code is always evaluated first. ``random``
    spends the rest of the budget on uniform draws; ``nelder-mead-multistart``
    spends half on draws and splits the remainder over simplex refinements of
    the ``n_starts`` best draws. Draw ``k`` uses its own RNG stream derived
    from ``(seed, k)``, and each refinement has a fixed budget, so results do
    not depend on ``workers``.

    Returns:
        SearchResult
    """
    ch.check_channel(channel)
    if method not in METHODS:
        raise ValueError(f"unknown search method {method!r}; choose from {METHODS}")
    if int(budget) != budget or budget < 1:
        raise ValueError(f"budget must be a positive integer, got {budget!r}")
    if int(n) != n or not 1 <= n <= n_max:
        raise ValueError(f"n must be an integer in [1, {n_max}], got {n!r}")
    n, budget = int(n), int(budget)
    baseline = entanglement_degradation(channel).D

    n_draws = budget if method == "random" else max(1, budget // 2)
    sampler = _Evaluator(channel, n, r_max, n_draws)
    streams = np.random.SeedSequence(seed).spawn(n_draws)
    draws = [np.zeros(2 * symplectic_size(n))]
    draws += [_random_vector(n, np.random.default_rng(s), r_max) for s in streams[1:]]
    for vec in draws:
        sampler(vec)

    evaluators = [sampler]
    remaining = budget - sampler.count
    if method == "nelder-mead-multistart" and remaining > 0:
        values = np.array(sampler.trace)
        values = np.where(np.isnan(values), INF, values)
        order = np.argsort(values, kind="stable")[:n_starts]
        shares = [remaining // len(order) + (i < remaining % len(order)) for i in range(len(order))]
        jobs = [(draws[i], share) for i, share in zip(order, shares)]

        def run(job):
            return _local_refine(channel, n, r_max, job[0], job[1])

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                evaluators += list(pool.map(run, jobs))
        else:
            evaluators += [run(job) for job in jobs]

    best_value, best_vec, trace, skipped, count = INF, draws[0], [], 0, 0
    for ev in evaluators:
        trace += ev.trace
        skipped += ev.skipped
        count += ev.count
        # strict '<' keeps the earliest evaluator on ties
        if ev.best[1] is not None and ev.best[0] < best_value:
            best_value, best_vec = ev.best
    if best_value == INF:
        raise NumericalError("every evaluation of the search failed")
    mask = _squeeze_mask(n)
    best_vec = best_vec.copy()
    best_vec[mask] = np.clip(best_vec[mask], -r_max, r_max)
    best = CodeParameterization.from_vector(best_vec, n, r_max)
    eff = effective_channel(realize(best), channel, check=False)
    result = SearchResult(
        best_params=best,
        best_D=float(best_value),
        baseline_D=float(baseline),
        evaluations=count,
        seed=seed,
        method=method,
        violated=bool(best_value < baseline - VIOLATION_TOL),
        skipped=skipped,
        best_det_N_GC=eff.det_N,
        best_det_M_GC=eff.det_M,
        trace=trace,
    )
    log.info(
        "search n=%d seed=%s: best D=%.6g (baseline %.6g), det N_GC=%.6g, %d evaluations, %d skipped",
        n, seed, result.best_D, result.baseline_D, result.best_det_N_GC, count, skipped,
    )
    if result.violated:
        log.error("no-go violation: best D %.12g < baseline %.12g", result.best_D, baseline)
    return result


def sweep_report(family, grid, n=2, budget=200, seed=0, r=8.0, method="nelder-mead-multistart"):
    """Closed-form, finite-squeezing and searched degradation over a family grid.

    Returns:
        list of dict: one row per grid value; a failing row carries its
        message in ``error`` and NaN elsewhere
    """
    from .entanglement import finite_r_degradation

    grid = list(grid)
    if not grid:
        raise ValueError("sweep grid is empty")
    rows = []
    for value in grid:
        row = {"family": family, "param": float(value)}
        try:
            channel = ch.family_channel(family, value)
            closed = entanglement_degradation(channel)
            res = search(channel, n, budget, seed, method=method)
            row.update(
                D_closed=closed.D,
                D_finite_r=min(1.0, finite_r_degradation(channel, r)),
                D_search_best=res.best_D,
                capacity_bound_log2=closed.capacity_bound,
                violated=res.violated,
                error="",
            )
        except (ValueError, ArithmeticError) as exc:
            nan = float("nan")
            row.update(
                D_closed=nan, D_finite_r=nan, D_search_best=nan,
                capacity_bound_log2=nan, violated=False, error=str(exc),
            )
        rows.append(row)
    return rows
