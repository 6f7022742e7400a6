"""Weight vectors built from received words, and correlation with codewords."""
import csv
import io
import math

import numpy as np

from .errors import EmptySubset, ZeroWeightVector
from .grs import lift
from .lattice import DEFAULT_TOL, coset_sums, lattice_sum


class ReceivedWord:
    def __init__(self, residues, q):
        self.q = int(q)
        self.residues = np.mod(np.asarray(residues, dtype=float).ravel(), self.q)

    @property
    def n(self):
        return len(self.residues)

    def lift(self):
        return lift(self.residues, self.q)

    def to_text(self):
        return ",".join(f"{v:.12g}" for v in self.residues)

    @classmethod
    def from_text(cls, text, q):
        vals = [float(t) for t in text.strip().split(",") if t.strip()]
        return cls(vals, q)

    def __repr__(self):
        return f"ReceivedWord(n={self.n}, q={self.q})"


class WeightVector:
    """n blocks of q weights; block i is indexed by Z_q."""

    def __init__(self, blocks, params=None):
        self.blocks = np.asarray(blocks, dtype=float)
        self.params = params

    @property
    def n(self):
        return self.blocks.shape[0]

    @property
    def q(self):
        return self.blocks.shape[1]

    def norm(self):
        return math.sqrt(math.fsum((self.blocks ** 2).ravel()))

    def max_entry(self):
        return float(self.blocks.max())

    def shifted(self, a):
        """Blocks cyclically shifted so entry x moves to x + a."""
        return WeightVector(np.roll(self.blocks, int(a), axis=1), self.params)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "x", "weight"])
        for i in range(self.n):
            for x in range(self.q):
                w.writerow([i, x, f"{self.blocks[i, x]:.12g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.DictReader(io.StringIO(text)))
        n = 1 + max(int(r["i"]) for r in rows)
        q = 1 + max(int(r["x"]) for r in rows)
        blocks = np.zeros((n, q))
        for r in rows:
            blocks[int(r["i"]), int(r["x"])] = float(r["weight"])
        return cls(blocks)


def build_weights(y, params, tol=DEFAULT_TOL):
    q = y.q
    diffs = y.residues[:, None] - np.arange(q)[None, :]
    return WeightVector(coset_sums(params, diffs, q, tol), params)


def indicator(c, q):
    c = np.asarray(c, dtype=np.int64) % q
    blocks = np.zeros((len(c), q))
    blocks[np.arange(len(c)), c] = 1.0
    return WeightVector(blocks)


def inner(W, c):
    c = np.asarray(c, dtype=np.int64) % W.q
    return math.fsum(W.blocks[np.arange(W.n), c])


def correlation(W, c):
    nrm = W.norm()
    if nrm == 0:
        raise ZeroWeightVector("weight vector has zero norm")
    return inner(W, c) / (nrm * math.sqrt(W.n))


def _log_f_terms(y, c, params):
    e = y.residues - np.asarray(c, dtype=float)
    return -(params.c * np.abs(lift(e, y.q)) / params.s) ** params.p


def corr_lower_bound(y, c, params, tol=DEFAULT_TOL):
    """(arithmetic, geometric) lower bounds on corr(build_weights(y), c)."""
    root = math.sqrt(lattice_sum(params, y.q, tol).upper())
    logs = _log_f_terms(y, c, params)
    arith = math.fsum(np.exp(logs)) / len(logs) / root
    geom = math.exp(math.fsum(logs) / len(logs)) / root
    return arith, geom


def restricted_bound(y, c, G, params, tol=DEFAULT_TOL):
    G = sorted(set(int(g) for g in G))
    if not G:
        raise EmptySubset("coordinate subset must be nonempty")
    root = math.sqrt(lattice_sum(params, y.q, tol).upper())
    logs = _log_f_terms(y, c, params)[G]
    return len(G) / y.n * math.exp(math.fsum(logs) / len(G)) / root
