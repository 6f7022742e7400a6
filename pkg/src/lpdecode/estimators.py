"""scikit-learn style wrappers: received words in rows, one column per coordinate."""
import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .decoder import DEFAULT_MAX_COST, soft_decode
from .errors import BudgetExceeded, RateTooHigh
from .grs import CodeSpec
from .lattice import DEFAULT_TOL, LpParams
from .rates import CONTINUOUS, A_bound, W_bound, ac_threshold, rate_ac, rate_wc
from .weights import ReceivedWord, build_weights


def check_residues(X, q, n=None):
    """2-D float array of residues reduced mod q; optional width check."""
    X = check_array(X, dtype=float, ensure_2d=True)
    if n is not None and X.shape[1] != n:
        raise ValueError(f"expected {n} columns, got {X.shape[1]}")
    return np.mod(X, q)


def check_codewords(y, q, n):
    y = check_array(y, dtype=np.int64, ensure_2d=True)
    if y.shape[1] != n:
        raise ValueError(f"expected codewords of length {n}, got {y.shape[1]}")
    return np.mod(y, q)


class LpWeightTransformer(TransformerMixin, BaseEstimator):
    """Maps received words to flattened weight vectors (n blocks of q)."""

    def __init__(self, q=17, p=2.0, s=1.0, tol=DEFAULT_TOL):
        self.q = q
        self.p = p
        self.s = s
        self.tol = tol

    def fit(self, X, y=None):
        X = check_residues(X, self.q)
        self.params_ = LpParams(self.p, self.s)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        X = check_residues(X, self.q, self.n_features_in_)
        out = [build_weights(ReceivedWord(row, self.q), self.params_, self.tol).blocks.ravel()
               for row in X]
        return np.vstack(out)


class LpListDecoder(BaseEstimator):
    """Soft list decoder for a GRS code under l_p noise.

    Give delta for the worst-case guarantee or r for a random channel; s defaults
    to the planner's optimum.
    """

    def __init__(self, q=17, n=16, k=2, p=2.0, delta=None, r=None, s=None, kind=CONTINUOUS,
                 alpha=0.5, tau=None, max_cost=DEFAULT_MAX_COST, tol=DEFAULT_TOL, force=False):
        self.q = q
        self.n = n
        self.k = k
        self.p = p
        self.delta = delta
        self.r = r
        self.s = s
        self.kind = kind
        self.alpha = alpha
        self.tau = tau
        self.max_cost = max_cost
        self.tol = tol
        self.force = force

    def fit(self, X=None, y=None):
        if (self.delta is None) == (self.r is None):
            raise ValueError("set exactly one of delta or r")
        code = CodeSpec(self.q, self.n, self.k)
        root = math.sqrt(code.rate_adj)
        if self.delta is not None:
            s = self.s if self.s is not None else rate_wc(self.p, self.q, self.delta, self.tol).s_star
            Wb = W_bound(self.p, self.q, self.delta, s, self.tol, upper=True)
            bound, tau = Wb * Wb, Wb - root
        else:
            s = self.s if self.s is not None else rate_ac(self.p, self.q, self.r, self.tol, kind=self.kind).s_star
            A = A_bound(self.p, self.q, self.r, s, self.kind, self.tol, upper=True)
            bound, tau = A * A, ac_threshold(A, code.rate_adj, self.alpha) - root
        if self.tau is not None:
            tau = self.tau
        if not (code.rate_adj < bound and tau > 0) and not self.force:
            raise RateTooHigh(f"R* = {code.rate_adj:.6g} is not below the bound {bound:.6g}")
        self.code_ = code
        self.s_ = s
        self.rate_bound_ = bound
        self.tau_ = tau if tau > 0 else 0.02
        self.n_features_in_ = self.n
        return self

    def decode_lists(self, X):
        check_is_fitted(self, "code_")
        X = check_residues(X, self.q, self.n)
        params = LpParams(self.p, self.s_)
        out = []
        for row in X:
            W = build_weights(ReceivedWord(row, self.q), params, self.tol)
            try:
                out.append(soft_decode(self.code_, W, self.tau_, self.max_cost))
            except BudgetExceeded:
                out.append(None)
        return out

    def predict(self, X):
        """Most correlated codeword in each list; rows of -1 when the list is empty."""
        res = self.decode_lists(X)
        pred = np.full((len(res), self.n), -1, dtype=np.int64)
        for i, r in enumerate(res):
            if r is not None and r.candidates:
                pred[i] = r.candidates[0].codeword
        return pred

    def score(self, X, y):
        """Fraction of rows whose transmitted codeword y appears in the decoded list."""
        y = check_codewords(y, self.q, self.n)
        res = self.decode_lists(X)
        hits = [r is not None and r.contains(c) for r, c in zip(res, y)]
        return float(np.mean(hits))
