"""Generalized Reed-Solomon codes over prime fields."""
import itertools
import json
import math

import numpy as np

from .errors import InvalidDimension, LengthTooLarge, LpDecodeError
from .field import PrimeField, Poly, check_degree, poly_eval_many


class CodeSpec:
    """GRS code: evaluation points alpha and nonzero twist factors over F_q."""

    def __init__(self, q, n, k, alpha=None, twist=None):
        self.field = q if isinstance(q, PrimeField) else PrimeField(q)
        q = self.field.q
        n, k = int(n), int(k)
        if n > q:
            raise LengthTooLarge(f"n = {n} exceeds q = {q}")
        if not 0 <= k <= n:
            raise InvalidDimension(f"need 0 <= k <= n, got k={k}, n={n}")
        alpha = list(range(n)) if alpha is None else [int(a) % q for a in alpha]
        twist = [1] * n if twist is None else [int(t) % q for t in twist]
        if len(alpha) != n or len(twist) != n:
            raise InvalidDimension("alpha and twist must have length n")
        if len(set(alpha)) != n:
            raise LpDecodeError("evaluation points must be distinct")
        if any(t == 0 for t in twist):
            raise LpDecodeError("twist factors must be nonzero")
        self.n, self.k = n, k
        self.alpha = np.array(alpha, dtype=np.int64)
        self.twist = np.array(twist, dtype=np.int64)

    @property
    def q(self):
        return self.field.q

    @property
    def rate(self):
        return self.k / self.n

    @property
    def rate_adj(self):
        return (self.k - 1) / self.n

    def message(self, coeffs):
        return Poly(coeffs, self.field)

    def encode_coeffs(self, coeffs):
        return self.twist * poly_eval_many(coeffs, self.alpha, self.q) % self.q

    def to_dict(self):
        return {"q": self.q, "n": self.n, "k": self.k,
                "alpha": [int(a) for a in self.alpha], "twist": [int(t) for t in self.twist]}

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d):
        return cls(d["q"], d["n"], d["k"], d.get("alpha"), d.get("twist"))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        return isinstance(other, CodeSpec) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return f"CodeSpec(q={self.q}, n={self.n}, k={self.k})"


def encode(code, message):
    if not isinstance(message, Poly):
        message = Poly(message, code.field)
    check_degree(message, code.k)
    return code.encode_coeffs(message.coeffs)


def subclass_alpha_alpha(q, n, k, alpha=None):
    q = int(q)
    if n > q - 1:
        raise LengthTooLarge(f"GRS(alpha, alpha) over F_{q} has at most {q - 1} points")
    pts = list(range(1, n + 1)) if alpha is None else list(alpha)
    if any(int(a) % q == 0 for a in pts):
        raise LpDecodeError("zero is excluded as an evaluation point")
    return CodeSpec(q, n, k, pts, pts)


def all_codewords(code):
    q, k = code.q, code.k
    msgs = np.array(list(itertools.product(range(q), repeat=k)), dtype=np.int64).reshape(-1, k)
    # Vandermonde [alpha^j] times message coefficients
    V = np.ones((code.n, k), dtype=np.int64)
    for j in range(1, k):
        V[:, j] = V[:, j - 1] * code.alpha % q
    words = np.zeros((len(msgs), code.n), dtype=np.int64)
    for j in range(k):
        words = (words + np.outer(msgs[:, j], V[:, j])) % q
    return msgs, words * code.twist % q


def lift(x, q):
    """Zero-centred representative in [-q/2, q/2)."""
    x = np.mod(np.asarray(x, dtype=float), q)
    return np.where(x >= q / 2, x - q, x)


def min_dist_lower_bound(p, n, k):
    if not 1 <= k <= n:
        raise InvalidDimension(f"need 1 <= k <= n, got k={k}, n={n}")
    if p == 2:
        return math.sqrt(((n + 1) ** 2 - k * k) * (n + 1) / (12 * k * k))
    if p == 1:
        return ((n + 1) ** 2 - k * k) / (4 * k)
    raise InvalidDimension(f"p must be 1 or 2, got {p}")


def min_dist_rate_form(p, n, k):
    """The weaker rate-only form of the same bound (squared for p=2)."""
    R = k / n
    if p == 2:
        return math.sqrt((1 - R * R) * n / (12 * R * R))
    if p == 1:
        return (1 - R * R) * n / (4 * R)
    raise InvalidDimension(f"p must be 1 or 2, got {p}")


def observed_min_distance(code, p):
    """Brute-force minimum lifted l_p norm over nonzero codewords (l2 is squared)."""
    _, words = all_codewords(code)
    lifted = np.abs(lift(words[1:], code.q))
    return float((lifted ** p).sum(axis=1).min()) if len(lifted) else math.inf


def r_uniq(p, delta):
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if p == 2:
        return 1 / math.sqrt(48 * delta * delta + 1)
    if p == 1:
        # rationalised form of -4d + sqrt(16d^2 + 1), stable for large d
        return 1 / (4 * delta + math.sqrt(16 * delta * delta + 1))
    raise InvalidDimension(f"p must be 1 or 2, got {p}")


def r_uniq_inverse(p, rate):
    """Largest relative distance uniquely decodable at the given rate."""
    if not 0 < rate <= 1:
        raise ValueError("rate must be in (0, 1]")
    if p == 2:
        return math.sqrt((1 / rate ** 2 - 1) / 48)
    if p == 1:
        return (1 - rate * rate) / (8 * rate)
    raise InvalidDimension(f"p must be 1 or 2, got {p}")


def format_codeword(word):
    return ",".join(str(int(v)) for v in word)


def parse_codeword(text, q=None):
    vals = [int(t) for t in text.strip().split(",") if t.strip()]
    return np.array(vals, dtype=np.int64) % q if q else np.array(vals, dtype=np.int64)
