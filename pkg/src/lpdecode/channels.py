"""Random and adversarial error channels, and the Monte Carlo decoding harness."""
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np

from .decoder import DEFAULT_MAX_COST, soft_decode
from .errors import BudgetInfeasible, LpDecodeError, UnsupportedExponent
from .grs import CodeSpec
from .lattice import LpParams, truncation_radius
from .rates import CONTINUOUS, DISCRETE, A_bound, W_bound, failure_prob, rate_ac, rate_wc
from .weights import ReceivedWord, build_weights, correlation

ADVERSARIAL = "ADVERSARIAL"
SPREAD = "SPREAD"
CONCENTRATED = "CONCENTRATED"
RANDOM_SPHERE = "RANDOM_SPHERE"
STRATEGIES = (SPREAD, CONCENTRATED, RANDOM_SPHERE)

DISCRETE_CUTOFF = 1e-15
QUANTILES = (0.01, 0.05, 0.5, 0.95, 0.99)
NO_MARGIN_TAU = 0.02  # threshold offset used when no guarantee applies


def stream(seed, trial=0):
    """Independent generator per (seed, trial); order of evaluation never matters."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial)])))


@dataclass(frozen=True)
class ChannelSpec:
    kind: str
    p: float
    r: float = None
    delta: float = None
    strategy: str = None
    seed: int = 0
    bad_coords: tuple = ()  # overwritten by uniform residues on top of the channel

    def __post_init__(self):
        if self.kind in (CONTINUOUS, DISCRETE):
            if self.p not in (1, 2):
                raise UnsupportedExponent(f"random channels need p in {{1, 2}}, got {self.p}")
            if not (self.r is not None and self.r > 0):
                raise ValueError("random channels need r > 0")
        elif self.kind == ADVERSARIAL:
            if self.delta is None or self.delta < 0:
                raise ValueError("adversarial channels need delta >= 0")
            if self.strategy not in STRATEGIES:
                raise ValueError(f"strategy must be one of {STRATEGIES}")
            if not 0 < self.p:
                raise UnsupportedExponent("p must be positive")
        else:
            raise ValueError(f"unknown channel kind {self.kind!r}")

    def to_dict(self):
        d = asdict(self)
        d["bad_coords"] = list(self.bad_coords)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["bad_coords"] = tuple(int(i) for i in d.get("bad_coords", ()))
        return cls(**d)


def _discrete_table(p, r):
    params = LpParams(p, r)
    X = truncation_radius(params, DISCRETE_CUTOFF)
    x = np.arange(-X, X + 1)
    w = params.f(x)
    cdf = np.cumsum(w)
    return x, cdf / cdf[-1]


def discrete_pmf(p, r, x):
    xs, cdf = _discrete_table(p, r)
    pmf = np.diff(np.concatenate([[0.0], cdf]))
    lookup = dict(zip(xs.tolist(), pmf))
    return np.array([lookup.get(int(v), 0.0) for v in np.atleast_1d(x)])


def sample_error_real(spec, n, rng):
    """Unreduced error draws over R (continuous) or Z (discrete)."""
    if spec.kind == CONTINUOUS:
        if spec.p == 1:
            # density proportional to exp(-2|x|/r): Laplace with scale r/2
            u = rng.random(n) - 0.5
            return -spec.r / 2 * np.sign(u) * np.log1p(-2 * np.abs(u))
        return rng.standard_normal(n) * (spec.r / math.sqrt(2 * math.pi))
    if spec.kind == DISCRETE:
        xs, cdf = _discrete_table(spec.p, spec.r)
        idx = np.searchsorted(cdf, rng.random(n), side="right")
        return xs[np.minimum(idx, len(xs) - 1)].astype(float)
    raise ValueError("sample_error handles random channels; use adversarial_error otherwise")


def sample_error(spec, n, q, rng=None):
    rng = stream(spec.seed) if rng is None else rng
    return np.mod(sample_error_real(spec, n, rng), q)


def lp_norm(e, p):
    e = np.abs(np.asarray(e, dtype=float))
    return float(np.sum(e ** p) ** (1 / p))


def adversarial_error(p, delta, n, q, strategy, seed=0, rng=None, max_tries=1000):
    """Real error of l_p norm exactly delta * n^(1/p), every entry within the lift range."""
    if delta > q / 2:
        raise BudgetInfeasible(f"delta = {delta} exceeds the per-coordinate cap q/2 = {q / 2}")
    rng = stream(seed) if rng is None else rng
    budget = delta * n ** (1 / p)
    if delta == 0:
        return np.zeros(n)
    signs = rng.choice([-1.0, 1.0], size=n)
    if strategy == SPREAD:
        return signs * delta
    if strategy == CONCENTRATED:
        m = min(n, math.ceil(n * min(1.0, (2 * delta / q) ** p) - 1e-12))
        m = max(m, 1)
        e = np.zeros(n)
        pos = rng.permutation(n)[:m]
        e[pos] = signs[:m] * min(q / 2, budget / m ** (1 / p))
        return _rescale(e, p, budget)
    if strategy == RANDOM_SPHERE:
        for _ in range(max_tries):
            g = rng.gamma(1 / p, size=n) ** (1 / p)
            e = _rescale(signs * g, p, budget)
            if np.all(np.abs(e) <= q / 2):
                return e
            signs = rng.choice([-1.0, 1.0], size=n)
        raise BudgetInfeasible(f"no sphere point inside the lift range after {max_tries} draws")
    raise ValueError(f"unknown strategy {strategy!r}")


def _rescale(e, p, budget):
    nrm = lp_norm(e, p)
    return e * (budget / nrm) if nrm > 0 else e


def channel_error(spec, n, q, rng):
    if spec.kind == ADVERSARIAL:
        e = adversarial_error(spec.p, spec.delta, n, q, spec.strategy, rng=rng)
    else:
        e = sample_error_real(spec, n, rng)
    e = np.mod(e, q)
    if spec.bad_coords:
        bad = np.array(spec.bad_coords, dtype=int)
        e[bad] = rng.integers(0, q, size=len(bad))
    return e


@dataclass
class TrialReport:
    trials: int
    successes: int
    mean_list_size: float
    corr_quantiles: dict
    bound: float = None
    bound_alpha: float = None
    decode_alpha: float = None
    threshold: float = None
    tau: float = None
    guaranteed: bool = False
    seed: int = 0
    errors: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def failures(self):
        return self.trials - self.successes

    @property
    def failure_rate(self):
        return self.failures / self.trials

    def binomial_se(self):
        f = self.failure_rate
        return math.sqrt(f * (1 - f) / self.trials)

    def to_dict(self):
        d = asdict(self)
        d["failure_rate"] = self.failure_rate
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        d.pop("failure_rate", None)
        return cls(**d)


def decoding_margin(code, channel, params, alpha=0.5, tol=1e-12):
    """(tau, guaranteed) for decoding this channel with weights params."""
    root = math.sqrt(code.rate_adj)
    if channel.kind == ADVERSARIAL:
        if params.p != channel.p:
            return NO_MARGIN_TAU, False
        gap = W_bound(params.p, code.q, channel.delta, params.s, tol, upper=True) - root
        if gap > 0:
            return gap, True
        return NO_MARGIN_TAU, False
    if params.p != channel.p:
        return NO_MARGIN_TAU, False
    A = A_bound(params.p, code.q, channel.r, params.s, channel.kind, tol, upper=True)
    if A > root:
        return (1 - alpha) * (A - root), True
    return NO_MARGIN_TAU, False


def _trial(t, code_dict, channel_dict, p, s, tau, seed, max_cost):
    code = CodeSpec.from_dict(code_dict)
    channel = ChannelSpec.from_dict(channel_dict)
    params = LpParams(p, s)
    rng = stream(seed, t)
    msg = rng.integers(0, code.q, size=code.k)
    c = code.encode_coeffs([int(v) for v in msg])
    y = np.mod(c + channel_error(channel, code.n, code.q, rng), code.q)
    W = build_weights(ReceivedWord(y, code.q), params)
    corr = correlation(W, c)
    try:
        res = soft_decode(code, W, tau, max_cost)
    except LpDecodeError as exc:
        return False, 0, corr, type(exc).__name__
    return res.contains(c), len(res.candidates), corr, None


def run_experiment(code, channel, params, trials, parallelism=1, seed=None, alpha=0.5,
                   bound_alpha=0.9, tau=None, max_cost=DEFAULT_MAX_COST):
    if trials < 1:
        raise ValueError("trials must be at least 1")
    seed = channel.seed if seed is None else seed
    auto_tau, guaranteed = decoding_margin(code, channel, params, alpha)
    tau = auto_tau if tau is None else tau
    job = partial(_trial, code_dict=code.to_dict(), channel_dict=channel.to_dict(),
                  p=params.p, s=params.s, tau=tau, seed=seed, max_cost=max_cost)
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as ex:
            out = list(ex.map(job, range(trials), chunksize=max(1, trials // (4 * parallelism))))
    else:
        out = [job(t) for t in range(trials)]
    errors = {}
    for _, _, _, err in out:
        if err is not None:
            errors[err] = errors.get(err, 0) + 1
    corrs = np.array([o[2] for o in out])
    bound = None
    if channel.kind != ADVERSARIAL and params.p == channel.p:
        try:
            bound = failure_prob(params.p, code.q, channel.r, params.s, bound_alpha, code.n,
                                 code.rate_adj, channel.kind)
        except LpDecodeError:
            bound = None
    return TrialReport(
        trials=trials,
        successes=sum(1 for o in out if o[0]),
        mean_list_size=float(np.mean([o[1] for o in out])),
        corr_quantiles={f"{qq:g}": float(np.quantile(corrs, qq)) for qq in QUANTILES},
        bound=bound, bound_alpha=bound_alpha, decode_alpha=alpha,
        threshold=math.sqrt(code.rate_adj) + tau, tau=float(tau), guaranteed=guaranteed,
        seed=int(seed), errors=errors,
        config={"code": code.to_dict(), "channel": channel.to_dict(),
                "params": {"p": params.p, "s": params.s}})


def resolve_scale(channel, code, s="AUTO"):
    """Explicit s wins; otherwise the planner's optimum for this channel."""
    if s not in (None, "AUTO"):
        return float(s)
    if channel.kind == ADVERSARIAL:
        return rate_wc(channel.p, code.q, max(channel.delta, 1e-6)).s_star
    return rate_ac(channel.p, code.q, channel.r, kind=channel.kind).s_star


def load_config(source):
    """Parse {code, channel, params, trials, seed} from a path, JSON text or dict."""
    if isinstance(source, dict):
        cfg = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{"):
            with open(text) as fh:
                text = fh.read()
        cfg = json.loads(text)
    code = CodeSpec.from_dict(cfg["code"])
    seed = int(cfg.get("seed", 0))
    ch = dict(cfg["channel"])
    ch.setdefault("seed", seed)
    channel = ChannelSpec.from_dict(ch)
    pr = cfg.get("params", {})
    p = float(pr.get("p", channel.p))
    s = resolve_scale(channel, code, pr.get("s", "AUTO")) if p == channel.p else float(pr["s"])
    trials = int(cfg.get("trials", 0))
    if trials < 1:
        raise ValueError("config needs trials >= 1")
    return code, channel, LpParams(p, s), trials, seed
