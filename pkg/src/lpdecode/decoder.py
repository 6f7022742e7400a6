"""Soft-decision Guruswami-Sudan list decoding driven by a weight vector.

Multiplicities are floor(lambda * W). lambda is searched until a dynamic-programming
certificate shows that every codeword whose correlation clears the threshold has
interpolation score above the weighted degree, so the list is provably complete.
"""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AllZero, BudgetExceeded, NullspaceEmpty, RateTooHigh, ZeroWeightVector
from .field import BivariatePoly, Poly, poly_eval_many, solve_nullspace
from .lattice import DEFAULT_TOL, LpParams
from .weights import WeightVector, build_weights, correlation

DEFAULT_MAX_COST = 3000
LAMBDA_CAP = 2.0 ** 20
FILTER_SLACK = 1e-9


@dataclass
class MultiplicityMatrix:
    m: np.ndarray
    cost: int


@dataclass
class Candidate:
    codeword: np.ndarray
    message: Poly
    correlation: float


@dataclass
class DecodeResult:
    candidates: list
    threshold: float
    diagnostics: dict = field(default_factory=dict)
    interpolant: object = None

    def codewords(self):
        return [tuple(int(v) for v in c.codeword) for c in self.candidates]

    def contains(self, word):
        return tuple(int(v) for v in word) in set(self.codewords())

    def to_dict(self):
        return {
            "threshold": float(self.threshold),
            "candidates": [{"message_coeffs": [int(v) for v in c.message.coeffs],
                            "codeword": [int(v) for v in c.codeword],
                            "correlation": float(c.correlation)} for c in self.candidates],
            "diagnostics": self.diagnostics,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _blocks(W):
    return W.blocks if isinstance(W, WeightVector) else np.asarray(W, dtype=float)


def assign_multiplicities(W, lam):
    if not lam > 0:
        raise ValueError("lambda must be positive")
    m = np.floor(lam * _blocks(W)).astype(np.int64)
    if not m.any():
        raise AllZero(f"lambda = {lam} gives no positive multiplicity")
    return MultiplicityMatrix(m, int((m * (m + 1) // 2).sum()))


def monomial_count(D, k):
    if k == 1:
        return math.inf
    w = k - 1
    return sum(D - w * b + 1 for b in range(D // w + 1))


def degree_budget(cost, k):
    """Least weighted degree D with more monomials than constraints (k = 1 uses D = 0)."""
    if k == 1:
        return 0
    w = k - 1
    # monomials ~ (D+1)(D+w+1)/(2w); start just below the estimate
    D = max(0, int(math.sqrt(2 * w * cost)) - 2 * w - 2)
    while monomial_count(D, k) <= cost:
        D += 1
    while D > 0 and monomial_count(D - 1, k) > cost:
        D -= 1
    return D


def monomials(D, k, cost):
    if k == 1:
        return [(0, b) for b in range(cost + 1)]
    w = k - 1
    mons = [(a, b) for b in range(D // w + 1) for a in range(D - w * b + 1)]
    mons.sort(key=lambda ab: (ab[0] + w * ab[1], ab[1]))
    return mons


def max_uncertified_weight(blocks, m, D):
    """Largest sum_i W_i(x_i) over choices x whose score sum_i m_i(x_i) is at most D."""
    dp = np.full(D + 1, -np.inf)
    dp[0] = 0.0
    for i in range(blocks.shape[0]):
        best = {}
        for mv, wv in zip(m[i].tolist(), blocks[i].tolist()):
            if mv <= D and wv > best.get(mv, -np.inf):
                best[mv] = wv
        nd = np.full(D + 1, -np.inf)
        for mv, wv in best.items():
            cand = dp[:D + 1 - mv] + wv
            np.maximum(nd[mv:], cand, out=nd[mv:])
        dp = nd
    return float(dp.max())


def certify(blocks, lam, k, target, max_cost=None):
    """(certified, multiplicities, degree budget, worst uncertified weight)."""
    m = np.floor(lam * blocks).astype(np.int64)
    cost = int((m * (m + 1) // 2).sum())
    if cost == 0:
        return False, m, cost, None, math.inf
    if max_cost is not None and cost > max_cost:
        return False, m, cost, None, math.inf
    D = degree_budget(cost, k)
    worst = max_uncertified_weight(blocks, m, D)
    return worst < target, m, cost, D, worst


def choose_lambda(blocks, k, target, max_cost=DEFAULT_MAX_COST, refine=14):
    top = blocks.max()
    lam = 1.0 / top
    prev_fail = None
    while True:
        ok, m, cost, D, worst = certify(blocks, lam, k, target)
        if ok:
            break
        if cost > max_cost or lam > LAMBDA_CAP:
            raise BudgetExceeded(
                f"no certified multiplicity assignment within {max_cost} constraints",
                {"lambda": float(lam), "cost": int(cost), "degree_budget": int(D),
                 "target_weight": float(target), "worst_uncertified_weight": float(worst),
                 "max_cost": int(max_cost)})
        prev_fail = lam
        lam *= 2
    best = (lam, m, cost, D)
    lo, hi = (prev_fail if prev_fail is not None else 0.5 * lam), lam
    for _ in range(refine):
        mid = 0.5 * (lo + hi)
        ok, m, cost, D, _ = certify(blocks, mid, k, target)
        if ok:
            hi = mid
            if cost <= best[2]:
                best = (mid, m, cost, D)
        else:
            lo = mid
    return best


def _binom_table(nmax, vmax, q):
    T = np.zeros((nmax + 1, vmax + 1), dtype=np.int64)
    T[:, 0] = 1
    for a in range(1, nmax + 1):
        T[a, 1:] = (T[a - 1, 1:] + T[a - 1, :-1]) % q
    return T


def _untwisted_points(code, m):
    # codeword symbol x at position i corresponds to RS value x * t_i^{-1}
    q = code.q
    pts = []
    for i in range(code.n):
        tinv = pow(int(code.twist[i]), q - 2, q)
        for x in np.flatnonzero(m[i]):
            pts.append((int(code.alpha[i]), int(x) * tinv % q, int(m[i, x])))
    return pts


def interpolation_matrix(code, mm, D):
    q, k = code.q, code.k
    mons = monomials(D, k, mm.cost)
    A = np.array([a for a, _ in mons], dtype=np.int64)
    B = np.array([b for _, b in mons], dtype=np.int64)
    mmax = int(mm.m.max())
    T = _binom_table(int(max(A.max(), B.max())), mmax, q)
    rows = []
    for alpha, beta, mult in _untwisted_points(code, mm.m):
        apow = poly_eval_powers(alpha, int(A.max()), q)
        bpow = poly_eval_powers(beta, int(B.max()), q)
        for u in range(mult):
            for v in range(mult - u):
                ok = (A >= u) & (B >= v)
                r = np.zeros(len(mons), dtype=np.int64)
                Au, Bv = A[ok], B[ok]
                r[ok] = T[Au, u] * T[Bv, v] % q * apow[Au - u] % q * bpow[Bv - v] % q
                rows.append(r)
    M = np.array(rows, dtype=np.int64).reshape(len(rows), len(mons))
    return M, mons


def poly_eval_powers(x, top, q):
    out = np.ones(top + 1, dtype=np.int64)
    for e in range(1, top + 1):
        out[e] = out[e - 1] * x % q
    return out


def interpolate(code, mm, D=None):
    D = degree_budget(mm.cost, code.k) if D is None else D
    M, mons = interpolation_matrix(code, mm, D)
    v = solve_nullspace(M, code.q, ncols=len(mons))
    if v is None:
        raise NullspaceEmpty("interpolation system has only the trivial solution")
    da = max(a for a, _ in mons)
    db = max(b for _, b in mons)
    grid = np.zeros((da + 1, db + 1), dtype=np.int64)
    for (a, b), c in zip(mons, v):
        grid[a, b] = int(c)
    return BivariatePoly(grid, code.q, code.k)


def check_interpolation(Q, code, mm):
    """Every constrained point is a zero of Q of the prescribed multiplicity."""
    for alpha, beta, mult in _untwisted_points(code, mm.m):
        if not Q.vanishes_to(alpha, beta, mult):
            return False
    return True


# --- root finding --------------------------------------------------------------

def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _pmod(a, b, q):
    a = list(a)
    inv = pow(b[-1], q - 2, q)
    while len(a) >= len(b):
        f = a[-1] * inv % q
        if f:
            off = len(a) - len(b)
            for i, bv in enumerate(b):
                a[off + i] = (a[off + i] - f * bv) % q
        a.pop()
    return _trim(a)


def _pmulmod(a, b, mod, q):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % q
    return _pmod(_trim(out), mod, q)


def _ppowmod(base, e, mod, q):
    result = [1]
    base = _pmod(base, mod, q)
    while e:
        if e & 1:
            result = _pmulmod(result, base, mod, q)
        base = _pmulmod(base, base, mod, q)
        e >>= 1
    return result


def _pgcd(a, b, q):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _pmod(a, b, q)
    if a:
        inv = pow(a[-1], q - 2, q)
        a = [x * inv % q for x in a]
    return a


def _split_roots(g, q, rng):
    # g is monic, squarefree, a product of distinct linear factors
    if len(g) == 1:
        return []
    if len(g) == 2:
        return [(-g[0]) % q]
    while True:
        a = int(rng.integers(0, q))
        # gcd(g, (X + a)^((q-1)/2) - 1) splits g for about half of all shifts a
        h = _ppowmod([a, 1], (q - 1) // 2, g, q) or [0]
        h[0] = (h[0] - 1) % q
        d = _pgcd(g, _trim(h), q)
        if 1 < len(d) < len(g):
            rest = _pdiv_exact(g, d, q)
            return _split_roots(d, q, rng) + _split_roots(rest, q, rng)


def _pdiv_exact(a, b, q):
    a = list(a)
    inv = pow(b[-1], q - 2, q)
    out = [0] * (len(a) - len(b) + 1)
    for off in range(len(a) - len(b), -1, -1):
        f = a[off + len(b) - 1] * inv % q
        out[off] = f
        for i, bv in enumerate(b):
            a[off + i] = (a[off + i] - f * bv) % q
    return _trim(out)


EXHAUSTIVE_ROOTS_BELOW = 1 << 17


def field_roots(coeffs, q, seed=0):
    """Distinct roots in F_q of a nonzero univariate polynomial (low-first ints)."""
    c = _trim([int(v) % q for v in coeffs])
    if not c:
        return list(range(q))
    if len(c) == 1:
        return []
    if q <= EXHAUSTIVE_ROOTS_BELOW:
        vals = poly_eval_many(c, np.arange(q), q)
        return [int(x) for x in np.flatnonzero(vals == 0)]
    if c[0] == 0:
        k = next(i for i, v in enumerate(c) if v)
        return sorted(set([0] + field_roots(c[k:], q, seed)))
    xq = _ppowmod([0, 1], q, c, q)
    xq = list(xq) + [0] * max(0, 2 - len(xq))
    xq[1] = (xq[1] - 1) % q
    g = _pgcd(c, _trim(xq), q)
    return sorted(_split_roots(g, q, np.random.default_rng(seed)))


def _shift_compose(Q, gamma, q):
    """Q(X, X*Y + gamma) with Q a dense int grid [a, b]."""
    da, db = Q.shape
    # M[b, j] = C(b, j) gamma^(b - j)
    M = np.zeros((db, db), dtype=object if q > 3 * 10 ** 9 else np.int64)
    g = [pow(gamma, e, q) for e in range(db)]
    for b in range(db):
        cb = 1
        for j in range(b + 1):
            M[b, j] = cb % q * g[b - j] % q
            cb = cb * (b - j) // (j + 1)
    if M.dtype == object or (db * (q - 1) ** 2) >= 2 ** 63:
        cols = np.array(Q, dtype=object).dot(np.array(M, dtype=object)) % q
    else:
        cols = Q @ M % q
    out = np.zeros((da + db, db), dtype=cols.dtype)
    for j in range(db):
        out[j:j + da, j] = cols[:, j]
    return out


def _normalise(Q):
    rows = np.flatnonzero(Q.any(axis=1))
    cols = np.flatnonzero(Q.any(axis=0))
    if len(rows) == 0:
        return Q[:0, :0]
    return Q[rows[0]:rows[-1] + 1, :cols[-1] + 1]


def y_roots(Q, k):
    """All f with deg f < k and (Y - f(X)) dividing Q, by Roth-Ruckenstein descent."""
    q = Q.q
    found = []

    def descend(G, depth, prefix):
        G = _normalise(G)
        if depth == k:
            found.append(list(prefix))
            return
        for gamma in field_roots(G[0, :].tolist(), q):
            descend(_shift_compose(G, gamma, q), depth + 1, prefix + [gamma])

    descend(Q.coeffs.copy(), 0, [])
    out = []
    seen = set()
    for pre in found:
        key = tuple(_trim(pre))
        if key in seen:
            continue
        if _trim(Q.substitute_y(pre)) == []:
            seen.add(key)
            out.append(Poly(pre, _field(q)))
    return out


_FIELDS = {}


def _field(q):
    from .field import PrimeField
    if q not in _FIELDS:
        _FIELDS[q] = PrimeField(q)
    return _FIELDS[q]


# --- decoding ---------------------------------------------------------------

def soft_decode(code, W, tau, max_cost=DEFAULT_MAX_COST, lam=None):
    if not tau > 0:
        raise ValueError("tau must be positive")
    if code.k < 1:
        raise ValueError("decoding needs k >= 1")
    blocks = _blocks(W)
    nrm = math.sqrt(math.fsum((blocks ** 2).ravel()))
    if nrm == 0:
        raise ZeroWeightVector("weight vector has zero norm")
    n = code.n
    threshold = math.sqrt(code.rate_adj) + tau
    target = (threshold - FILTER_SLACK) * nrm * math.sqrt(n)
    if lam is None:
        lam, m, cost, D = choose_lambda(blocks, code.k, target, max_cost)
        certified = True
    else:
        ok, m, cost, D, _ = certify(blocks, lam, code.k, target)
        certified = bool(ok)
        if cost == 0:
            raise AllZero(f"lambda = {lam} gives no positive multiplicity")
        if cost > max_cost:
            raise BudgetExceeded(f"cost {cost} exceeds {max_cost}", {"lambda": float(lam), "cost": int(cost)})
        D = degree_budget(cost, code.k) if D is None else D
    mm = MultiplicityMatrix(m, cost)
    Q = interpolate(code, mm, D)
    Wv = W if isinstance(W, WeightVector) else WeightVector(blocks)
    cands = []
    for f in y_roots(Q, code.k):
        word = code.encode_coeffs(f.coeffs)
        corr = correlation(Wv, word)
        if corr >= threshold - FILTER_SLACK:
            cands.append(Candidate(word, f, corr))
    cands.sort(key=lambda c: (-c.correlation, tuple(c.codeword)))
    diag = {"lambda": float(lam), "cost": int(cost), "degree_budget": int(D), "certified": certified,
            "matrix_rows": cost, "matrix_cols": len(monomials(D, code.k, cost)),
            "y_degree": int(Q.y_degree()) if not Q.is_zero() else -1,
            "max_weight": float(blocks.max())}
    return DecodeResult(cands, threshold, diag, Q)


def tau_for_plan(plan, code, tol=DEFAULT_TOL):
    from .rates import W_bound
    return W_bound(plan.p, code.q, plan.delta, plan.s_star, tol, upper=True) - math.sqrt(code.rate_adj)


def decode_lp(code, y, p, plan, tol=DEFAULT_TOL, max_cost=DEFAULT_MAX_COST):
    if plan.p != p:
        raise ValueError(f"plan is for p = {plan.p}, decoder asked for p = {p}")
    if plan.q != code.q:
        raise ValueError("plan and code use different moduli")
    if code.rate_adj >= plan.rate_bound:
        raise RateTooHigh(f"R* = {code.rate_adj:.6g} is not below the planned bound {plan.rate_bound:.6g}")
    tau = tau_for_plan(plan, code, tol)
    if not tau > 0:
        raise RateTooHigh(f"no margin at s = {plan.s_star:.6g}: tau = {tau:.3g}")
    W = build_weights(y, LpParams(p, plan.s_star), tol)
    res = soft_decode(code, W, tau, max_cost=max_cost)
    res.diagnostics.update({"tau": tau, "s": plan.s_star, "delta": plan.delta,
                            "max_weight": W.max_entry()})
    return res
