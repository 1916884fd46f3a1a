"""Exact coefficient-space solve of the anisotropic fractional Poisson problem.

After rescaling, the determining equations couple (l, n) only with
(l - 2, n + 1) and (l + 2, n - 1).  The index grid of each mu branch therefore
splits into finite chains running from (l0, 0) down to l in {0, 1} (mu = +1)
or {1, 2} (mu = -1), and each chain is one symmetric tridiagonal block with
constant off-diagonal k1 - k2.

Chain sizes m = 1, 2, ... label the blocks; ``max_chain`` bounds m.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from .basis import BasisIndex, CoefficientField
from .errors import NotSPDError, TruncationError

__all__ = [
    "ChainBlock",
    "SolveResult",
    "renumber",
    "chain_of",
    "chain_indices",
    "assemble_block",
    "solve_block",
    "gershgorin_bounds",
    "rhs_scale",
    "solution_scale",
    "solve",
    "solve_stages",
]

EVEN, ODD = "even", "odd"


def renumber(l, n):
    """Position j of d_{l,n} in the global block ordering (mu = +1 grid)."""
    s = l + 2 * n
    num = s * s + 2 * (l + 4 * n + 2) + (l % 2)
    assert num % 4 == 0
    return num // 4


def chain_of(l, n, mu):
    """(parity, m) of the chain through (l, n) in branch mu."""
    BasisIndex(l, n, mu)
    start = l + 2 * n
    if start % 2:
        return ODD, (start + 1) // 2
    return EVEN, (start // 2 + 1 if mu == 1 else start // 2)


def chain_indices(mu, parity, m):
    """(l, n) pairs of a chain, from its n = 0 head to its terminal entry."""
    if m < 1:
        raise ValueError("chain size must be at least 1")
    if parity == ODD:
        start = 2 * m - 1
    elif parity == EVEN:
        start = 2 * m - 2 if mu == 1 else 2 * m
    else:
        raise ValueError(f"unknown parity {parity!r}")
    return [(start - 2 * i, i) for i in range(m)]


@dataclass(frozen=True)
class ChainBlock:
    mu: int
    parity: str
    m: int
    indices: tuple
    diag: np.ndarray
    off: np.ndarray

    def dense(self):
        a = np.diag(self.diag)
        if self.m > 1:
            a += np.diag(self.off, 1) + np.diag(self.off, -1)
        return a

    def matvec(self, v):
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        return out


def _terminal_diag(mu, parity, k1, k2):
    if parity == EVEN:
        return k1 + k2 if mu == 1 else 2.0 * (k1 + k2)
    return 2.0 * (k1 if mu == 1 else k2) + (k1 + k2)


def assemble_block(mu, parity, m, params):
    """Rescaled tridiagonal block for one chain."""
    k1, k2 = params.k1, params.k2
    diag = np.full(m, 2.0 * (k1 + k2))
    diag[-1] = _terminal_diag(mu, parity, k1, k2)
    off = np.full(m - 1, k1 - k2)
    return ChainBlock(mu, parity, m, tuple(chain_indices(mu, parity, m)), diag, off)


def solve_block(block, rhs):
    """LDL^T solve without pivoting; the blocks are SPD for k1, k2 > 0."""
    b = np.asarray(rhs, dtype=float)
    m = block.m
    if b.shape != (m,):
        raise ValueError(f"rhs has shape {b.shape}, block size is {m}")
    piv = np.empty(m)
    ratio = np.empty(max(m - 1, 0))
    z = np.empty(m)
    piv[0] = block.diag[0]
    z[0] = b[0]
    for i in range(1, m):
        if not piv[i - 1] > 0.0:
            raise NotSPDError(f"nonpositive pivot {piv[i - 1]} at row {i - 1}")
        ratio[i - 1] = block.off[i - 1] / piv[i - 1]
        piv[i] = block.diag[i] - ratio[i - 1] * block.off[i - 1]
        z[i] = b[i] - ratio[i - 1] * z[i - 1]
    if not piv[-1] > 0.0:
        raise NotSPDError(f"nonpositive pivot {piv[-1]} at row {m - 1}")
    x = z / piv
    for i in range(m - 2, -1, -1):
        x[i] -= ratio[i] * x[i + 1]
    return x


def gershgorin_bounds(block):
    radius = np.zeros(block.m)
    if block.m > 1:
        radius[:-1] += np.abs(block.off)
        radius[1:] += np.abs(block.off)
    return float(np.min(block.diag - radius)), float(np.max(block.diag + radius))


def rhs_scale(l, n, alpha):
    """f-tilde / f = 2^(2-alpha) Gamma(n+1+l) / Gamma(n+1+alpha/2+l)."""
    a = alpha / 2.0
    return 2.0 ** (2.0 - alpha) * math.exp(gammaln(n + 1 + l) - gammaln(n + 1 + a + l))


def solution_scale(n, alpha):
    """d / u = Gamma(n+1+alpha/2) / Gamma(n+1), u in the halved convention."""
    return math.exp(gammaln(n + 1 + alpha / 2.0) - gammaln(n + 1))


class SolveResult(NamedTuple):
    """Solution and the two intermediate coefficient stages.

    ``u`` is halved-convention; ``d`` and ``ftilde`` are indexed like u
    and carry the rescaled unknowns / right-hand side.
    """

    u: CoefficientField
    d: CoefficientField
    ftilde: CoefficientField


def solve_stages(f, params, max_chain):
    """Solve L(u~) = f chain by chain and keep the rescaled stages."""
    alpha = params.alpha
    a = alpha / 2.0
    if abs(f.beta - a) > 1e-14:
        raise ValueError(f"right-hand side must be in the alpha/2 = {a} family, got beta={f.beta}")
    if max_chain < 1:
        raise ValueError("max_chain must be at least 1")
    f = f.to_raw()
    chains = set()
    for idx, value in f.items():
        if value == 0.0:
            continue
        parity, m = chain_of(idx.l, idx.n, idx.mu)
        if m > max_chain:
            raise TruncationError(
                f"rhs entry {idx} lies on chain m={m} beyond max_chain={max_chain}")
        chains.add((idx.mu, parity, m))

    u, d, ft = {}, {}, {}
    for mu, parity, m in sorted(chains, key=lambda c: (-c[0], c[2], c[1])):
        block = assemble_block(mu, parity, m, params)
        rhs = np.array([rhs_scale(l, n, alpha) * f[(l, n, mu)] for l, n in block.indices])
        sol = solve_block(block, rhs)
        for (l, n), bj, dj in zip(block.indices, rhs, sol):
            key = BasisIndex(l, n, mu)
            ft[key] = bj
            d[key] = dj
            u[key] = dj / solution_scale(n, alpha)
    return SolveResult(CoefficientField(u, a, "halved"), CoefficientField(d, a, "raw"),
                       CoefficientField(ft, a, "raw"))


def solve(f, params, max_chain):
    """Coefficients u (halved convention) with apply_forward(u) = f."""
    return solve_stages(f, params, max_chain).u
