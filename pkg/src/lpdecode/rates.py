"""Worst- and average-case rate bounds, the scale optimiser and comparison curves.

Two objective families are available. ``method="exact"`` maximises the quantity
itself, using the numerically evaluated f_s(L_q). ``method="bound"`` maximises the
analytic lower bounds on 1/f_s(L_q) built from the fudge factors, which is what
the published rate curves are drawn from.
"""
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import MarginNonpositive, OutOfDomain, UnsupportedExponent
from .grs import r_uniq
from .lattice import DEFAULT_TOL, R0, LpParams, c_p, fudge_E, fudge_Eq, integer_sum, lattice_sum

CONTINUOUS = "CONTINUOUS"
DISCRETE = "DISCRETE"
EXACT = "exact"
BOUND = "bound"

S_RANGE = (1e-3, 1e3)
GRID_POINTS = 81
DELTA_MIN_L2 = math.sqrt(math.log(4)) / (2 * math.pi)


@dataclass
class RatePlan:
    p: float
    q: int
    mode: str
    s_star: float
    rate_bound: float
    delta: float = None
    r: float = None
    closed_form_bound: float = None
    fudge: dict = field(default_factory=dict)
    tau_suggestion: float = None
    method: str = EXACT
    kind: str = None

    def to_dict(self):
        return asdict(self)

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _lsum(p, q, s, tol, upper=False):
    res = lattice_sum(LpParams(p, s), q, tol)
    return res.upper() if upper else res.value


def W_bound(p, q, delta, s, tol=DEFAULT_TOL, upper=False):
    if not s > 0 or delta < 0:
        raise ValueError("need s > 0 and delta >= 0")
    return math.exp(-(c_p(p) * delta / s) ** p) / math.sqrt(_lsum(p, q, s, tol, upper))


def inv_lattice_lower(p, q, s):
    """Analytic lower bound on 1/f_s(L_q); None outside its hypotheses."""
    if p == 2:
        if not R0 * (1 + 1e-6) < s < q / R0 * (1 - 1e-6):
            return None
        return math.sqrt(2) / s * fudge_Eq(s, q) ** 2
    if p == 1:
        return math.tanh(2 / s) * fudge_E(1, q / s)
    raise UnsupportedExponent("the analytic objective exists for p = 1 or 2 only")


def _window(p, q, method, seeds):
    lo = min(S_RANGE[0], min(seeds) / 100)
    hi = max(S_RANGE[1], max(seeds) * 100)
    if p not in (1, 2):
        # no closed form: heavy tails make wide scales expensive, and the optimum sits near the seed
        hi = min(hi, max(S_RANGE[1], max(seeds) * 30), float(q))
    if method == BOUND and p == 2:
        lo = max(lo, R0 * (1 + 1e-6))
        hi = min(hi, q / R0 * (1 - 1e-6))
    return lo, hi


def maximize_log_scale(fun, lo, hi, seeds=(), grid=GRID_POINTS, xtol=1e-9):
    """Global max of fun on [lo, hi]: log grid plus seeds, then golden refinement of the best brackets."""
    ts = np.linspace(math.log(lo), math.log(hi), grid)
    extra = [math.log(x) for x in seeds if lo < x < hi]
    ts = np.unique(np.concatenate([ts, extra]))
    vals = np.array([fun(math.exp(t)) for t in ts])
    order = np.argsort(-vals)
    best_t, best_v = ts[order[0]], vals[order[0]]
    tried = set()
    for idx in order[:4]:
        if idx in tried or vals[idx] <= 0:
            continue
        tried.add(idx)
        if not 0 < idx < len(ts) - 1:
            continue
        a, b, c = ts[idx - 1], ts[idx], ts[idx + 1]
        if not (vals[idx] > vals[idx - 1] and vals[idx] > vals[idx + 1]):
            continue
        res = minimize_scalar(lambda t: -fun(math.exp(t)), bracket=(a, b, c), method="golden",
                              options={"xtol": xtol})
        if a <= res.x <= c and -res.fun > best_v:
            best_t, best_v = res.x, -res.fun
    return math.exp(best_t), float(best_v)


def wc_seed(p, delta):
    if p == 2:
        return delta * math.sqrt(4 * math.pi)
    if p == 1:
        return 4 / math.log(_D(delta))
    # stationary point of exp(-2 (c delta / s)^p) / s, the large-q shape of W^2
    return (2 * p) ** (1 / p) * c_p(p) * delta


def _D(delta):
    return math.sqrt(1 + 1 / (delta * delta)) + 1 / delta


def _wc_objective(p, q, delta, method, tol):
    cp = c_p(p)
    if method == EXACT:
        return lambda s: math.exp(-2 * (cp * delta / s) ** p) / _lsum(p, q, s, tol)

    def bound(s):
        inv = inv_lattice_lower(p, q, s)
        return 0.0 if inv is None else math.exp(-2 * (cp * delta / s) ** p) * inv
    return bound


def rate_wc(p, q, delta, tol=DEFAULT_TOL, method=EXACT, rate_adj=None):
    if not delta > 0:
        raise ValueError("delta must be positive")
    if method == BOUND and p not in (1, 2):
        raise UnsupportedExponent("method='bound' needs p = 1 or 2")
    seed = wc_seed(p, delta)
    seeds = (seed, seed / 4, seed * 4)
    lo, hi = _window(p, q, method, seeds)
    s_star, val = maximize_log_scale(_wc_objective(p, q, delta, method, tol), lo, hi, seeds)
    closed = None
    if p in (1, 2):
        try:
            closed = rate_wc_closed(p, q, delta)
        except OutOfDomain:
            pass
    plan = RatePlan(p, q, "WC", s_star, min(val, 1.0), delta=delta, closed_form_bound=closed,
                    fudge=_fudge_at(p, q, s_star), method=method)
    if rate_adj is not None:
        plan.tau_suggestion = (math.sqrt(plan.rate_bound) - math.sqrt(rate_adj)) / 2
    return plan


def _fudge_at(p, q, s):
    out = {}
    if p == 2:
        for name, arg in (("E(s)", s), ("E(q/s)", q / s)):
            if arg >= R0:
                out[name] = fudge_E(2, arg)
        if "E(s)" in out and "E(q/s)" in out:
            out["E_q(s)"] = math.sqrt(out["E(s)"] * out["E(q/s)"])
    elif p == 1:
        out["E(q/s)"] = fudge_E(1, q / s)
        out["tanh(2/s)"] = math.tanh(2 / s)
    return out


def rate_wc_closed(p, q, delta):
    if p == 2:
        if not delta > DELTA_MIN_L2 or q < 4 * math.pi * delta * delta:
            raise OutOfDomain(f"closed form needs delta > {DELTA_MIN_L2:.4f} and q >= 4 pi delta^2")
        s = delta * math.sqrt(4 * math.pi)
        return fudge_Eq(s, q) ** 2 / (delta * math.sqrt(2 * math.pi * math.e))
    if p == 1:
        if not delta > 0:
            raise OutOfDomain("delta must be positive")
        D = _D(delta)
        return (D - 1) / (D + 1) * fudge_E(1, q * math.log(D) / 4) / D ** delta
    raise OutOfDomain(f"no closed form for p = {p}")


def mu(p, r, s, kind=CONTINUOUS, tol=DEFAULT_TOL):
    if not (r > 0 and s > 0):
        raise ValueError("need r, s > 0")
    norm = (r ** p + s ** p) ** (1 / p)
    if kind == CONTINUOUS:
        return s / norm
    if kind == DISCRETE:
        t = r * s / norm
        return integer_sum(LpParams(p, t), tol) / integer_sum(LpParams(p, r), tol)
    raise ValueError(f"unknown kind {kind!r}")


def A_bound(p, q, r, s, kind=CONTINUOUS, tol=DEFAULT_TOL, upper=False):
    return mu(p, r, s, kind, tol) / math.sqrt(_lsum(p, q, s, tol, upper))


def rate_ac(p, q, r, tol=DEFAULT_TOL, method=EXACT, kind=CONTINUOUS, rate_adj=None):
    if not r > 0:
        raise ValueError("r must be positive")
    if method == BOUND and p not in (1, 2):
        raise UnsupportedExponent("method='bound' needs p = 1 or 2")
    if method == EXACT:
        def obj(s):
            return mu(p, r, s, kind, tol) ** 2 / _lsum(p, q, s, tol)
    else:
        def obj(s):
            inv = inv_lattice_lower(p, q, s)
            return 0.0 if inv is None else mu(p, r, s, kind, tol) ** 2 * inv
    seeds = (r, r / 4, r * 4)
    lo, hi = _window(p, q, method, seeds)
    s_star, val = maximize_log_scale(obj, lo, hi, seeds)
    plan = RatePlan(p, q, "AC", s_star, min(val, 1.0), r=r, closed_form_bound=rate_ac_closed(p, q, r),
                    fudge=_fudge_at(p, q, s_star), method=method, kind=kind)
    if rate_adj is not None:
        plan.tau_suggestion = (math.sqrt(plan.rate_bound) - math.sqrt(rate_adj)) / 2
    return plan


def rate_ac_closed(p, q, r):
    """Closed forms at s = r; None when out of their domain."""
    if p == 2:
        if not R0 < r < q / R0:
            return None
        return fudge_Eq(r, q) ** 2 / (r * math.sqrt(2))
    if p == 1:
        return math.tanh(2 / r) / 4 * fudge_E(1, q / r)
    return None


def ac_threshold(A, rate_adj, alpha):
    root = math.sqrt(rate_adj)
    return root + (1 - alpha) * (A - root)


def _margin(p, q, r, s, rate_adj, kind, tol):
    A = A_bound(p, q, r, s, kind, tol)
    if A <= math.sqrt(rate_adj):
        raise MarginNonpositive(f"A = {A:.6g} does not exceed sqrt(R*) = {math.sqrt(rate_adj):.6g}")
    return A


def failure_prob(p, q, r, s, alpha, n, rate_adj, kind=CONTINUOUS, tol=DEFAULT_TOL):
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    A = _margin(p, q, r, s, rate_adj, kind, tol)
    fL = _lsum(p, q, s, tol)
    return math.exp(-2 * n * fL * alpha ** 2 * (A - math.sqrt(rate_adj)) ** 2)


def failure_prob_via_gamma(p, q, r, s, alpha, n, rate_adj, kind=CONTINUOUS, tol=DEFAULT_TOL):
    """Same bound reached through the Hoeffding gap gamma = mu - T * sqrt(f_s(L_q))."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    A = _margin(p, q, r, s, rate_adj, kind, tol)
    T = ac_threshold(A, rate_adj, alpha)
    gamma = mu(p, r, s, kind, tol) - T * math.sqrt(_lsum(p, q, s, tol))
    return math.exp(-2 * gamma * gamma * n)


def competitor(p, delta):
    if p == 2:
        return max(0.0, 1 - 2 * delta * delta)
    if p == 1:
        return max(0.0, 1 - delta)
    raise UnsupportedExponent("comparison curves exist for p = 1 or 2")


CURVE_COLUMNS = ("delta", "rate_wc_opt", "rate_wc_closed", "competitor", "rate_uniq")


def _curve_row(args):
    p, q, delta, method, tol = args
    plan = rate_wc(p, q, delta, tol, method)
    return {"delta": delta, "rate_wc_opt": plan.rate_bound, "rate_wc_closed": plan.closed_form_bound,
            "competitor": competitor(p, delta), "rate_uniq": r_uniq(p, delta)}


def comparison_curves(p, q, delta_grid, method=BOUND, tol=DEFAULT_TOL, workers=1):
    grid = [float(d) for d in delta_grid]
    if not grid:
        raise ValueError("delta grid is empty")
    jobs = [(p, q, d, method, tol) for d in grid]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            return list(ex.map(_curve_row, jobs))
    return [_curve_row(j) for j in jobs]


def crossover(p, q, lo=None, hi=None, method=BOUND, tol=DEFAULT_TOL, iters=60):
    """delta where our worst-case curve meets the competitor, by bisection."""
    lo = (0.3 if p == 2 else 0.5) if lo is None else lo
    hi = (0.7 if p == 2 else 0.95) if hi is None else hi

    def gap(d):
        return rate_wc(p, q, d, tol, method).rate_bound - competitor(p, d)

    glo = gap(lo)
    if glo * gap(hi) > 0:
        raise ValueError("no sign change on the bracket")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        g = gap(mid)
        if (g > 0) == (glo > 0):
            lo, glo = mid, g
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    d = 0.5 * (lo + hi)
    return d, rate_wc(p, q, d, tol, method).rate_bound


def decodable_delta(p, q, rate, method=EXACT, tol=DEFAULT_TOL, iters=60):
    """Largest delta with rate_wc(delta) >= rate (rate_wc decreases in delta)."""
    lo, hi = 1e-6, 1.0
    while rate_wc(p, q, hi, tol, method).rate_bound > rate:
        lo, hi = hi, hi * 2
    for _ in range(iters):
        mid = math.sqrt(lo * hi)
        if rate_wc(p, q, mid, tol, method).rate_bound > rate:
            lo = mid
        else:
            hi = mid
        if hi / lo < 1 + 1e-12:
            break
    return math.sqrt(lo * hi)


def restricted_rate(base_rate, g, n):
    if not 1 <= g <= n:
        raise ValueError(f"need 1 <= g <= n, got g={g}, n={n}")
    return (g / n) ** 2 * base_rate
