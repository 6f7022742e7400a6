"""Prime-field arithmetic, polynomials over F_q and modular linear algebra."""
import math

import numpy as np

from .errors import DegreeTooLarge, DivideByZero, FieldMismatch, NotPrime

NEG_INFINITY = float("-inf")

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n):
    # deterministic Miller-Rabin; these bases are exact below 3.3e24
    n = int(n)
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


class PrimeField:
    __slots__ = ("q",)

    def __init__(self, q):
        q = int(q)
        if q < 2 or not is_prime(q):
            raise NotPrime(q)
        self.q = q

    def __call__(self, value):
        return FieldElem(int(value) % self.q, self)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.q == self.q

    def __hash__(self):
        return hash(("F", self.q))

    def __repr__(self):
        return f"GF({self.q})"

    def inv(self, a):
        a = int(a) % self.q
        if a == 0:
            raise DivideByZero("inverse of 0")
        return pow(a, self.q - 2, self.q)

    def elements(self):
        return [FieldElem(v, self) for v in range(self.q)]


def field_new(q):
    return PrimeField(q)


class FieldElem:
    __slots__ = ("value", "field")

    def __init__(self, value, field):
        self.value = int(value) % field.q
        self.field = field

    @property
    def modulus(self):
        return self.field.q

    def _coerce(self, other):
        if isinstance(other, FieldElem):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field} vs {other.field}")
            return other.value
        return int(other) % self.field.q

    def __add__(self, other):
        return FieldElem(self.value + self._coerce(other), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElem(self.value - self._coerce(other), self.field)

    def __rsub__(self, other):
        return FieldElem(self._coerce(other) - self.value, self.field)

    def __mul__(self, other):
        return FieldElem(self.value * self._coerce(other), self.field)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElem(-self.value, self.field)

    def inv(self):
        return FieldElem(self.field.inv(self.value), self.field)

    def __truediv__(self, other):
        return self * FieldElem(self._coerce(other), self.field).inv()

    def __pow__(self, e):
        if e < 0:
            return self.inv() ** (-e)
        return FieldElem(pow(self.value, e, self.field.q), self.field)

    def __eq__(self, other):
        if isinstance(other, FieldElem):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.field.q
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.field.q))

    def __int__(self):
        return self.value

    __index__ = __int__

    def __repr__(self):
        return f"{self.value} (mod {self.field.q})"


def inv(a):
    return a.inv()


class Poly:
    """Univariate polynomial over F_q, coefficients stored low degree first."""

    __slots__ = ("field", "coeffs")

    def __init__(self, coeffs, field):
        q = field.q
        c = [int(v) % q for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.field = field
        self.coeffs = tuple(c)

    @classmethod
    def zero(cls, field):
        return cls((), field)

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INFINITY

    @property
    def coefficients(self):
        return [FieldElem(v, self.field) for v in self.coeffs]

    def is_zero(self):
        return not self.coeffs

    def _check(self, other):
        if other.field != self.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other):
        self._check(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)], self.field)

    def __neg__(self):
        return Poly([-v for v in self.coeffs], self.field)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, FieldElem)):
            return Poly([v * int(other) for v in self.coeffs], self.field)
        self._check(other)
        if self.is_zero() or other.is_zero():
            return Poly.zero(self.field)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return Poly(out, self.field)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Poly) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.coeffs, self.field.q))

    def __call__(self, x):
        return poly_eval(self, x)

    def __repr__(self):
        return f"Poly({list(self.coeffs)}, q={self.field.q})"


def poly_eval(f, x):
    if isinstance(x, FieldElem):
        if x.field != f.field:
            raise FieldMismatch(f"{f.field} vs {x.field}")
        xv = x.value
    else:
        xv = int(x) % f.field.q
    q = f.field.q
    acc = 0
    for c in reversed(f.coeffs):
        acc = (acc * xv + c) % q
    return FieldElem(acc, f.field)


def poly_eval_many(coeffs, xs, q):
    """Vectorised Horner over an int array of points; coeffs are plain ints."""
    xs = np.asarray(xs, dtype=np.int64) % q
    acc = np.zeros_like(xs)
    for c in reversed(list(coeffs)):
        acc = (acc * xs + int(c)) % q
    return acc


def check_degree(f, k):
    if f.degree >= k:
        raise DegreeTooLarge(f"deg {f.degree} >= k = {k}")


class BivariatePoly:
    """Dense Q(X, Y) = sum coeffs[a, b] X^a Y^b with (1, k-1) weighted degree."""

    def __init__(self, coeffs, q, k=1):
        self.coeffs = np.asarray(coeffs, dtype=np.int64) % q
        self.q = int(q)
        self.k = int(k)

    def is_zero(self):
        return not self.coeffs.any()

    def support(self):
        return [tuple(int(t) for t in ab) for ab in np.argwhere(self.coeffs)]

    def weighted_degree(self):
        sup = self.support()
        if not sup:
            return NEG_INFINITY
        return max(a + (self.k - 1) * b for a, b in sup)

    def y_degree(self):
        cols = np.nonzero(self.coeffs.any(axis=0))[0]
        return int(cols[-1]) if len(cols) else NEG_INFINITY

    def evaluate(self, x, y):
        q = self.q
        X, Y = self.coeffs.shape
        xp = [pow(int(x), a, q) for a in range(X)]
        yp = [pow(int(y), b, q) for b in range(Y)]
        tot = 0
        for a, b in self.support():
            tot += int(self.coeffs[a, b]) * xp[a] * yp[b]
        return tot % q

    def hasse(self, u, v, x, y):
        """Hasse derivative D^(u,v) Q evaluated at (x, y)."""
        q = self.q
        tot = 0
        for a, b in self.support():
            if a >= u and b >= v:
                tot += int(self.coeffs[a, b]) * math.comb(a, u) * math.comb(b, v) * pow(int(x), a - u, q) * pow(int(y), b - v, q)
        return tot % q

    def vanishes_to(self, x, y, m):
        return all(self.hasse(u, v, x, y) == 0 for u in range(m) for v in range(m - u))

    def substitute_y(self, f_coeffs):
        """Univariate Q(X, f(X)) as a low-first int list."""
        q = self.q
        X, Y = self.coeffs.shape
        f = [int(c) % q for c in f_coeffs] or [0]
        out = [0]
        power = [1]
        for b in range(Y):
            col = [int(c) for c in self.coeffs[:, b]]
            if any(col):
                prod = _pmul(col, power, q)
                out = _padd(out, prod, q)
            power = _pmul(power, f, q)
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        return out

    def __repr__(self):
        return f"BivariatePoly(shape={self.coeffs.shape}, q={self.q}, terms={len(self.support())})"


def _pmul(a, b, q):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % q
    return out


def _padd(a, b, q):
    n = max(len(a), len(b))
    return [((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % q for i in range(n)]


def _as_int_matrix(A, q, ncols=None):
    if isinstance(A, np.ndarray) and A.dtype != object:
        return A.astype(np.int64) % q
    rows = [[int(v) % q for v in row] for row in A]
    if not rows:
        return np.zeros((0, ncols or 0), dtype=np.int64)
    return np.array(rows, dtype=np.int64)


def solve_nullspace(A, q, ncols=None):
    """First nonzero kernel vector of A over F_q, or None.

    Columns are scanned left to right and elimination stops at the first column
    that depends on its predecessors, so the returned vector is supported on the
    shortest possible prefix of columns. ``ncols`` sizes an empty row list.
    """
    q = int(q)
    M = _as_int_matrix(A, q, ncols)
    R, C = M.shape
    if C == 0:
        return None
    if R == 0:
        v = np.zeros(C, dtype=np.int64)
        v[0] = 1
        return v
    block = min(32, (1 << 53) // (q * q))
    if block >= 8:
        return _nullspace_blocked(M.astype(np.float64), q, block)
    return _nullspace_exact(M, q)


def _reduce(x, q, inv):
    # in-place x mod q for exact float integers below 2^53; fmod is ~10x slower
    x -= np.floor(x * inv) * q
    x += q * (x < 0)
    x -= q * (x >= q)
    return x


def _nullspace_blocked(A, q, block):
    # right-looking blocked elimination; every float product/sum stays below 2^53
    R, C = A.shape
    qinv = 1.0 / q
    r = 0
    for c0 in range(0, C, block):
        c1 = min(C, c0 + block)
        r0 = r
        P = A[r0:, c0:c1].copy()  # contiguous panel, rows relative to r0
        L = np.zeros((R - r0, c1 - c0))
        for j in range(c0, c1):
            if r == R:
                A[r0:, c0:c1] = P
                return _back_substitute(A, q, r)
            i, jj = r - r0, j - c0
            nz = np.flatnonzero(P[i:, jj])
            if len(nz) == 0:
                A[r0:, c0:c1] = P
                return _back_substitute(A, q, r)
            p = i + int(nz[0])
            if p != i:
                P[[i, p]] = P[[p, i]]
                L[[i, p]] = L[[p, i]]
                A[[r, r0 + p]] = A[[r0 + p, r]]
            ip = pow(int(P[i, jj]), q - 2, q)
            if i + 1 < len(P):
                mult = _reduce(P[i + 1:, jj] * ip, q, qinv)
                L[i + 1:, i] = mult
                if jj + 1 < c1 - c0:
                    sub = P[i + 1:, jj + 1:]
                    sub -= np.outer(mult, P[i, jj + 1:])
                    _reduce(sub, q, qinv)
                P[i + 1:, jj] = 0
            r += 1
        A[r0:, c0:c1] = P
        t = r - r0
        if c1 < C and t:
            for u in range(1, t):
                row = A[r0 + u, c1:] - L[u, :u] @ A[r0:r0 + u, c1:]
                A[r0 + u, c1:] = _reduce(row, q, qinv)
            if r < R:
                A[r:, c1:] = _reduce(A[r:, c1:] - L[t:, :t] @ A[r0:r, c1:], q, qinv)
        if r == C:
            return None
    if r < C:
        return _back_substitute(A, q, r)
    return None


def _back_substitute(A, q, j):
    # columns 0..j-1 are pivots sitting on rows 0..j-1; column j is free
    C = A.shape[1]
    v = np.zeros(C, dtype=np.int64)
    v[j] = 1
    U = A[:j, :j + 1].astype(np.int64)
    for t in range(j - 1, -1, -1):
        s = int((U[t, t + 1:j + 1] * v[t + 1:j + 1] % q).sum() % q)
        v[t] = (-s * pow(int(U[t, t]), q - 2, q)) % q
    return v


def _nullspace_exact(M, q):
    # arbitrary-size moduli: python ints, unblocked
    A = [[int(x) for x in row] for row in M.tolist()]
    R, C = len(A), len(A[0])
    r = 0
    for j in range(C):
        if r == R:
            break
        p = next((i for i in range(r, R) if A[i][j]), None)
        if p is None:
            break
        A[r], A[p] = A[p], A[r]
        ip = pow(A[r][j], q - 2, q)
        for i in range(r + 1, R):
            if A[i][j]:
                f = A[i][j] * ip % q
                A[i] = [(a - f * b) % q for a, b in zip(A[i], A[r])]
        r += 1
    else:
        if r == C:
            return None
    if r == C:
        return None
    j = r
    v = [0] * C
    v[j] = 1
    for t in range(j - 1, -1, -1):
        s = sum(A[t][u] * v[u] for u in range(t + 1, j + 1)) % q
        v[t] = (-s * pow(A[t][t], q - 2, q)) % q
    return np.array(v, dtype=object)
