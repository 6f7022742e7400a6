"""Fast embedded checks: closed forms against brute force, bound properties, a small decode."""
import itertools
import math
import time

import numpy as np

from .decoder import soft_decode
from .grs import CodeSpec, all_codewords, encode
from .lattice import LpParams, lattice_sum, lattice_sum_factored, psf_check
from .rates import rate_wc
from .weights import ReceivedWord, WeightVector, build_weights, corr_lower_bound, correlation


def brute_lattice_sum(params, q, R):
    """f_s over the points (z, z) + q Z^2 with both coordinates in [-R, R]."""
    total = []
    for z in range(-R, R + 1):
        js = np.arange(-((R + z) // q) - 1, (R - z) // q + 2)
        b = z + q * js
        b = b[np.abs(b) <= R]
        a = float(params.f(z))
        total.append(a * math.fsum(params.f(b.astype(float))))
    return math.fsum(total)


def _check_p1_closed(fault):
    worst = 0.0
    for q, s in itertools.product((2, 3, 5, 7, 17), (0.5, 1, 2, 4)):
        pr = LpParams(1, s)
        R = int(math.ceil(s / 2 * math.log(1e14 * (1 + s)))) + q
        exact = lattice_sum(pr, q).value + fault
        worst = max(worst, abs(exact - brute_lattice_sum(pr, q, R)))
    return worst < 1e-9, f"max abs error {worst:.3g}"


def _check_psf(fault):
    worst = max(psf_check(LpParams(2, s)) for s in (0.5, 1, 2, 4)) + fault
    return worst < 1e-10, f"max |f_s(Z) - s f_1/s(Z)| {worst:.3g}"


def _check_factored(fault):
    worst = 0.0
    for q, s in ((5, 1.0), (17, 2.0), (101, 7.5)):
        direct = lattice_sum(LpParams(2, s), q).value + fault
        worst = max(worst, abs(direct - lattice_sum_factored(s, q)) / direct)
    return worst < 1e-10, f"max relative gap {worst:.3g}"


def _check_corr_bound(fault):
    rng = np.random.default_rng(1)
    slack = math.inf
    for _ in range(100):
        q = int(rng.choice([5, 17]))
        n = int(rng.choice([2, 8]))
        pr = LpParams(int(rng.choice([1, 2])), float(rng.choice([0.5, 1, 2])))
        y = ReceivedWord(rng.random(n) * q, q)
        c = rng.integers(0, q, n)
        arith, geom = corr_lower_bound(y, c, pr)
        corr = correlation(build_weights(y, pr), c) - fault
        slack = min(slack, corr - arith, arith - geom)
    return slack >= -1e-9, f"min slack {slack:.3g}"


def _check_encode(fault):
    word = encode(CodeSpec(5, 5, 2), [1, 1 + int(fault)])
    word = [int(v) for v in word]
    return word == [1, 2, 3, 4, 0], f"codeword {word}"


def _check_decode(fault):
    rng = np.random.default_rng(2)
    code = CodeSpec(5, 4, 2)
    msgs, words = all_codewords(code)
    missed = 0
    for _ in range(5):
        W = WeightVector(rng.random((4, 5)))
        tau = 0.15
        T = math.sqrt(code.rate_adj) + tau
        want = {tuple(int(v) for v in w) for w in words if correlation(W, w) >= T}
        got = set(soft_decode(code, W, tau).codewords())
        missed += len(want - got)
    missed += int(fault)
    return missed == 0, f"missed {missed} codewords"


def _check_rate_anchor(fault):
    v = rate_wc(2, 10007, 1.0).rate_bound + fault
    want = 1 / math.sqrt(2 * math.pi * math.e)
    return abs(v - want) < 1e-4, f"rate {v:.8f} vs {want:.8f}"


def _check_weights_shift(fault):
    pr = LpParams(2, 1.5)
    W0 = build_weights(ReceivedWord(np.zeros(3), 11), pr)
    W3 = build_weights(ReceivedWord(np.full(3, 3.0), 11), pr)
    gap = float(np.max(np.abs(W0.shifted(3).blocks - W3.blocks))) + fault
    return gap < 1e-12, f"shift gap {gap:.3g}"


CHECKS = {
    "lattice_p1_closed_form": _check_p1_closed,
    "psf_identity": _check_psf,
    "lattice_factored_route": _check_factored,
    "corr_lower_bound": _check_corr_bound,
    "weights_shift_covariance": _check_weights_shift,
    "encode_example": _check_encode,
    "decoder_completeness": _check_decode,
    "rate_anchor_l2": _check_rate_anchor,
}


def run_selftest(fault=None):
    """List of result dicts; fault names a check whose input is perturbed (test hook)."""
    results = []
    for name, fn in CHECKS.items():
        t0 = time.perf_counter()
        try:
            ok, detail = fn(1.0 if name == fault else 0.0)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append({"name": name, "passed": bool(ok), "detail": detail,
                        "seconds": round(time.perf_counter() - t0, 3)})
    return results
