"""Maximum likelihood for the BGN family.

The optimiser works on u = (ln alpha, ln beta, mu, ln sigma, ln s) with the
data first standardised by its median and half interquartile range. The
objective is the mean log-likelihood, so ``grad_tol`` is a per-observation
gradient norm in those coordinates and the fit is exactly equivariant under
affine changes of the data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _backend
from .bgn import BgnParams, make_rng
from .errors import DomainError

__all__ = [
    "FitOptions",
    "FitResult",
    "AscentResult",
    "loglik",
    "score",
    "init_params",
    "start_set",
    "maximize",
    "fit_bgn",
]

LOG_CEIL = 30.0
STALL_STEPS = 8
# starts whose total log-likelihoods differ by less than this count as the same optimum
TIE_LL = 1e-9
# kernel gradient order is (alpha, beta, mu, sigma, s); the public score uses (s, mu, sigma, alpha, beta)
_SCORE_ORDER = (4, 2, 3, 0, 1)


@dataclass(frozen=True)
class FitOptions:
    max_iter: int = 500
    grad_tol: float = 1e-6
    n_starts: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")
        if not (self.grad_tol > 0.0):
            raise DomainError("grad_tol must be positive")
        if self.n_starts < 1:
            raise DomainError("n_starts must be >= 1")


@dataclass(frozen=True)
class FitResult:
    params: BgnParams
    loglik: float
    converged: bool
    iterations: int
    grad_norm: float
    start_index: int
    history: tuple[float, ...] = field(default=(), repr=False, compare=False)


@dataclass(frozen=True)
class AscentResult:
    u: np.ndarray
    value: float
    grad: np.ndarray
    converged: bool
    iterations: int
    history: tuple[float, ...]

    @property
    def grad_norm(self) -> float:
        return float(np.max(np.abs(self.grad))) if self.grad.size else 0.0


def _data(data: Sequence[float]) -> np.ndarray:
    x = np.ascontiguousarray(data, dtype=np.float64).ravel()
    if x.size == 0:
        raise DomainError("data must be nonempty")
    if not np.all(np.isfinite(x)):
        raise DomainError("data must be finite")
    return x


def _loglik_grad(x: np.ndarray, p: BgnParams, need: bool) -> tuple[float, np.ndarray]:
    g = np.zeros(5)
    ll, _ = _backend.kernels.bgn_loglik_grad(x, *p.as_tuple(), g, need)
    if not math.isfinite(ll):
        return -math.inf, g
    return ll, g


def loglik(data: Sequence[float], p: BgnParams) -> float:
    """Total log-likelihood; -inf when some observation has zero density."""
    ll, _ = _loglik_grad(_data(data), p, False)
    return ll


def score(data: Sequence[float], p: BgnParams) -> np.ndarray:
    """Gradient of the total log-likelihood, ordered (s, mu, sigma, alpha, beta)."""
    x = _data(data)
    if p.s < 1.0 and np.any(x == p.mu):
        raise DomainError("score is undefined at x == mu when s < 1")
    ll, g = _loglik_grad(x, p, True)
    if not math.isfinite(ll):
        raise DomainError("log-likelihood is -inf at these parameters")
    return g[list(_SCORE_ORDER)]


# --- starts -------------------------------------------------------------------

def _location_scale(x: np.ndarray) -> tuple[float, float]:
    if x.size < 10:
        raise DomainError("at least 10 observations are required")
    med = float(np.median(x))
    q1, q3 = np.percentile(x, [25.0, 75.0])
    scale = float(q3 - q1) / 2.0
    if not scale > 0.0:
        # heavily tied data: fall back on the standard deviation
        scale = float(np.std(x))
    if not scale > 0.0:
        raise DomainError("data have zero spread")
    return med, scale


def init_params(data: Sequence[float]) -> BgnParams:
    """Median / half-IQR start with alpha = beta = 1 and s = 2."""
    med, scale = _location_scale(_data(data))
    return BgnParams(1.0, 1.0, med, scale, 2.0)


def start_set(data: Sequence[float], n_starts: int, seed: int) -> list[BgnParams]:
    """Start 0 is ``init_params``; the rest jitter alpha, beta, s log-uniformly by [1/4, 4]."""
    base = init_params(data)
    starts = [base]
    if n_starts > 1:
        rng = make_rng(seed, 0x5747)
        f = np.exp(rng.uniform(-math.log(4.0), math.log(4.0), size=(n_starts - 1, 3)))
        for fa, fb, fs in f:
            starts.append(BgnParams(base.alpha * fa, base.beta * fb, base.mu, base.sigma, base.s * fs))
    return starts


# --- ascent -------------------------------------------------------------------

def maximize(
    fun: Callable[[np.ndarray], tuple[float, np.ndarray]],
    u0: np.ndarray,
    max_iter: int,
    grad_tol: float,
    bounds: np.ndarray | None = None,
    snap: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray] | None] | None = None,
) -> AscentResult:
    """BFGS ascent with a backtracking line search that never lowers ``fun``.

    ``fun`` returns (value, gradient); a non-finite value marks an infeasible
    point. ``bounds`` is an optional per-coordinate absolute ceiling.

    ``snap`` handles kinks: when the smooth ascent stalls it may propose
    (u', pinned) where u' moves some coordinates onto a point of
    non-differentiability that is a local maximum along them. The proposal is
    taken only if it does not lower ``fun``; pinned coordinates are then
    frozen and excluded from the gradient test, and their gradient entries may
    be non-finite.
    """
    u = np.array(u0, dtype=np.float64)
    if bounds is not None:
        u = np.clip(u, -bounds, bounds)
    dim = u.size
    pinned = np.zeros(dim, dtype=bool)

    def masked(g: np.ndarray, at: np.ndarray) -> np.ndarray | None:
        # pinned coordinates and bound coordinates pushing outward are stationary
        g = np.where(pinned, 0.0, g)
        if bounds is not None:
            g = np.where(((at >= bounds) & (g > 0.0)) | ((at <= -bounds) & (g < 0.0)), 0.0, g)
        return g if np.all(np.isfinite(g)) else None

    f, g_raw = fun(u)
    g = masked(g_raw, u) if math.isfinite(f) else None
    if g is None:
        return AscentResult(u, -math.inf, np.full_like(u, math.inf), False, 0, ())
    h = np.eye(dim)
    history = [f]
    it = 0
    fresh = True
    flat = 0

    def try_snap() -> bool:
        # called when the smooth ascent stalls; True if a kink was newly pinned
        nonlocal u, f, g, g_raw
        if snap is None or pinned.any():
            return False
        prop = snap(u)
        if prop is None:
            return False
        us, mask = prop
        fs, gs_raw = fun(us)
        pinned[:] = mask
        gs = masked(gs_raw, us) if math.isfinite(fs) else None
        if gs is None or fs < f:
            pinned[:] = False
            return False
        u, f, g, g_raw = us, fs, gs, gs_raw
        return True

    while True:
        if pinned.any() and snap is not None and snap(u) is None:
            # the kink is gone (e.g. the shape left the cusped range)
            pinned[:] = False
            g = masked(g_raw, u)
            if g is None:
                break
            h, fresh = np.eye(dim), True
        if np.max(np.abs(g)) <= grad_tol or it >= max_iter:
            break
        free = ~pinned
        h[pinned, :] = 0.0
        h[:, pinned] = 0.0
        # zero entries of g are pinned or held at a bound: keep them fixed
        d = np.where(g == 0.0, 0.0, h @ g)
        slope = float(g @ d)
        if not slope > 0.0:
            h = np.diag(free.astype(np.float64))
            d = g.copy()
            slope = float(g @ g)
        # keep the first trial step moderate in the unconstrained coordinates
        dmax = float(np.max(np.abs(d)))
        step = min(1.0, 2.0 / dmax) if dmax > 0 else 1.0
        accepted = False
        for _ in range(40):
            un = u + step * d
            if bounds is not None:
                un = np.clip(un, -bounds, bounds)
            fn, gn_raw = fun(un)
            gn = masked(gn_raw, un) if math.isfinite(fn) else None
            if gn is not None and fn >= f + 1e-4 * step * slope and fn >= f:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            if fresh:
                if try_snap():
                    h, fresh, flat = np.eye(dim), True, 0
                    continue
                break
            # curvature model went stale; retry once along the gradient
            h = np.eye(dim)
            fresh = True
            continue
        it += 1
        sv = un - u
        yv = g - gn
        sy = float(sv @ yv)
        if sy > 1e-12 * float(np.linalg.norm(sv) * np.linalg.norm(yv)) and sy > 0:
            if fresh:
                h = np.diag(free * (sy / float(yv @ yv)))
            rho = 1.0 / sy
            hy = h @ yv
            h = h - rho * (np.outer(sv, hy) + np.outer(hy, sv)) + (rho * rho * float(yv @ hy) + rho) * np.outer(sv, sv)
            fresh = False
        # no relative progress for several steps: the gradient target is out of reach
        flat = flat + 1 if fn - f <= 1e-13 * max(1.0, abs(f)) else 0
        u, f, g, g_raw = un, fn, gn, gn_raw
        history.append(f)
        if flat >= STALL_STEPS:
            if try_snap():
                h, fresh, flat = np.eye(dim), True, 0
                history.append(f)
                continue
            break
    if g is None:
        g = np.full_like(u, math.inf)
    conv = bool(np.max(np.abs(g)) <= grad_tol)
    return AscentResult(u, f, g, conv, it, tuple(history))


def _to_u(p: BgnParams) -> np.ndarray:
    return np.array([math.log(p.alpha), math.log(p.beta), p.mu, math.log(p.sigma), math.log(p.s)])


def _from_u(u: np.ndarray) -> BgnParams:
    return BgnParams(math.exp(u[0]), math.exp(u[1]), float(u[2]), math.exp(u[3]), math.exp(u[4]))


def _objective(z: np.ndarray) -> Callable[[np.ndarray], tuple[float, np.ndarray]]:
    n = float(z.size)

    def fun(u: np.ndarray) -> tuple[float, np.ndarray]:
        p = _from_u(u)
        ll, g = _loglik_grad(z, p, True)
        if not math.isfinite(ll):
            return -math.inf, g
        # chain rule for the log-transformed coordinates; a non-finite mu entry
        # (mu exactly on a datum with s < 1) is left for the snapping logic
        jac = np.array([p.alpha, p.beta, 1.0, p.sigma, p.s])
        with np.errstate(over="ignore", invalid="ignore"):
            return ll / n, g * jac / n

    return fun


def _cusp_snapper(z: np.ndarray) -> Callable[[np.ndarray], tuple[np.ndarray, np.ndarray] | None]:
    """For s < 1 each datum is an upward cusp of the likelihood in mu.

    Gradient steps in mu crawl once they reach such a cusp, so on a stall mu
    is moved onto the nearest datum and held there (a strict local maximum
    along mu). The ascent accepts the move only if it does not lower the
    likelihood.
    """
    zs = np.sort(z)
    mask = np.array([False, False, True, False, False])

    def snap(u: np.ndarray) -> tuple[np.ndarray, np.ndarray] | None:
        if u[4] >= 0.0:
            return None
        mu = u[2]
        k = int(np.searchsorted(zs, mu))
        near = [zs[j] for j in (k - 1, k) if 0 <= j < zs.size]
        target = min(near, key=lambda v: abs(v - mu))
        v = u.copy()
        v[2] = target
        return v, mask

    return snap


def _select(results: list[tuple[int, AscentResult]], n: int) -> tuple[int, AscentResult]:
    """Highest loglik; among starts within TIE_LL of it, a converged one, then the lowest index."""
    top = max(r.value for _, r in results)
    tied = [(i, r) for i, r in results if (top - r.value) * n <= TIE_LL]
    conv = [(i, r) for i, r in tied if r.converged]
    return min(conv or tied, key=lambda t: t[0])


def fit_bgn(data: Sequence[float], opts: FitOptions = FitOptions()) -> FitResult:
    """Multi-start maximum likelihood fit; the best start wins, ties to the lowest index."""
    x = _data(data)
    med, scale = _location_scale(x)
    z = (x - med) / scale
    fun = _objective(z)
    snap = _cusp_snapper(z)
    bounds = np.array([LOG_CEIL, LOG_CEIL, 1e12, LOG_CEIL, LOG_CEIL])
    results: list[tuple[int, AscentResult]] = []
    for idx, p0 in enumerate(start_set(x, opts.n_starts, opts.seed)):
        pz = BgnParams(p0.alpha, p0.beta, (p0.mu - med) / scale, p0.sigma / scale, p0.s)
        res = maximize(fun, _to_u(pz), opts.max_iter, opts.grad_tol, bounds, snap)
        if math.isfinite(res.value):
            results.append((idx, res))
    if not results:
        raise DomainError("log-likelihood is -inf at every start")
    best = _select(results, x.size)
    idx, res = best
    pz = _from_u(res.u)
    params = BgnParams(pz.alpha, pz.beta, med + scale * pz.mu, scale * pz.sigma, pz.s)
    n = x.size
    shift = n * math.log(scale)
    return FitResult(
        params=params,
        loglik=res.value * n - shift,
        converged=res.converged,
        iterations=res.iterations,
        grad_norm=res.grad_norm,
        start_index=idx,
        history=tuple(v * n - shift for v in res.history),
    )
