"""Weighted orthogonal basis V_{l,mu}(x) P_n^{(beta,l)}(2r^2 - 1) on the unit disk.

Coefficient fields come in two conventions.  ``raw`` stores the plain basis
coefficient.  ``halved`` stores the l = 0 entries doubled (the expansion uses
u_{0,n,1} / 2), which is the form the solver works in because it makes the
coupling blocks symmetric.
"""

import csv
import io
import math
from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np
from scipy.special import roots_jacobi

from .errors import BasisIndexError, ResolutionError
from .jacobi import jacobi_norm, jacobi_table

__all__ = [
    "BasisIndex",
    "CoefficientField",
    "eval_solid_harmonic",
    "eval_basis_function",
    "eval_expansion",
    "basis_norm_h",
    "project",
    "disk_quadrature",
    "write_coefficients",
    "read_coefficients",
    "format_coefficients",
    "parse_coefficients",
]

CONVENTIONS = ("raw", "halved")


@dataclass(frozen=True)
class BasisIndex:
    l: int
    n: int
    mu: int

    def __post_init__(self):
        if self.l < 0 or self.n < 0:
            raise BasisIndexError(f"negative basis index {self}")
        if self.mu not in (1, -1):
            raise BasisIndexError(f"mu must be +1 or -1, got {self.mu}")
        if self.l == 0 and self.mu == -1:
            raise BasisIndexError("V_{0,-1} vanishes and is not a basis function")

    def sort_key(self):
        return (-self.mu, self.l, self.n)


def _as_index(key):
    if isinstance(key, BasisIndex):
        return key
    l, n, mu = key
    return BasisIndex(int(l), int(n), int(mu))


@dataclass(frozen=True)
class CoefficientField:
    """Finitely supported coefficients over the disk basis.

    Attributes:
        entries: read-only map BasisIndex -> coefficient; missing keys are zero.
        beta: Jacobi exponent of the radial family the coefficients refer to.
        convention: ``"raw"`` or ``"halved"`` (see module docstring).
    """

    entries: MappingProxyType = field(default_factory=dict)
    beta: float = 0.0
    convention: str = "raw"

    def __post_init__(self):
        if self.convention not in CONVENTIONS:
            raise ValueError(f"unknown coefficient convention {self.convention!r}")
        clean = {}
        for key, value in dict(self.entries).items():
            idx = _as_index(key)
            clean[idx] = clean.get(idx, 0.0) + float(value)
        ordered = dict(sorted(clean.items(), key=lambda kv: kv[0].sort_key()))
        object.__setattr__(self, "entries", MappingProxyType(ordered))

    def __getitem__(self, key):
        return self.entries.get(_as_index(key), 0.0)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def items(self):
        return self.entries.items()

    def raw_items(self):
        """(index, plain basis coefficient) pairs, whatever the storage convention."""
        for idx, value in self.entries.items():
            if self.convention == "halved" and idx.l == 0:
                value = 0.5 * value
            yield idx, value

    def to_raw(self):
        if self.convention == "raw":
            return self
        return CoefficientField(dict(self.raw_items()), self.beta, "raw")

    def to_halved(self):
        if self.convention == "halved":
            return self
        doubled = {idx: (2.0 * v if idx.l == 0 else v) for idx, v in self.entries.items()}
        return CoefficientField(doubled, self.beta, "halved")

    def pruned(self, tol=0.0):
        """Copy without entries of magnitude <= tol."""
        kept = {k: v for k, v in self.entries.items() if abs(v) > tol}
        return CoefficientField(kept, self.beta, self.convention)

    def max_abs_diff(self, other):
        keys = set(self.entries) | set(other.entries)
        return max((abs(self[k] - other[k]) for k in keys), default=0.0)


def eval_solid_harmonic(l, mu, x, y):
    """r^l cos(l phi) for mu = +1, r^l sin(l phi) for mu = -1."""
    BasisIndex(l, 0, mu)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if l == 0:
        val = np.ones(np.broadcast(x, y).shape)
    elif l == 1:
        val = x + 0.0 * y if mu == 1 else y + 0.0 * x
    elif l == 2:
        val = x * x - y * y if mu == 1 else 2.0 * x * y
    else:
        r = np.hypot(x, y)
        phi = np.arctan2(y, x)
        trig = np.cos(l * phi) if mu == 1 else np.sin(l * phi)
        val = r ** l * trig
    return float(val) if val.ndim == 0 else val


def eval_basis_function(l, n, mu, beta, x, y):
    """V_{l,mu}(x, y) P_n^{(beta,l)}(2r^2 - 1), no weight."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    t = 2.0 * (x * x + y * y) - 1.0
    val = eval_solid_harmonic(l, mu, x, y) * jacobi_table(n, beta, l, t)[n]
    return float(val) if np.ndim(val) == 0 else val


def eval_expansion(c, x, y, weighted=False):
    """Sum the expansion ``c`` at points (x, y).

    With ``weighted`` the sum is multiplied by (1 - r^2)_+^beta, which is zero
    outside the disk for beta > 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x, y = np.broadcast_arrays(x, y)
    r2 = x * x + y * y
    t = 2.0 * r2 - 1.0
    total = np.zeros(x.shape)
    by_l = {}
    for idx, value in c.raw_items():
        by_l.setdefault(idx.l, []).append((idx, value))
    for l in sorted(by_l):
        terms = by_l[l]
        nmax = max(idx.n for idx, _ in terms)
        table = jacobi_table(nmax, c.beta, l, t)
        for idx, value in terms:
            total = total + value * eval_solid_harmonic(l, idx.mu, x, y) * table[idx.n]
    if weighted:
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(r2 < 1.0, np.abs(1.0 - r2) ** c.beta, 0.0)
        total = total * w
    return float(total) if total.ndim == 0 else total


def basis_norm_h(l, n, beta):
    """L2_beta(disk) norm of V_{l,mu} P_n^{(beta,l)}(2r^2 - 1).

    Substituting t = 2r^2 - 1 reduces the disk integral to the one-dimensional
    Jacobi norm: h^2 = c_l / 4 * 2^(-beta-l) * |||P_n^{(beta,l)}|||^2 with
    c_0 = 2 pi and c_l = pi for l >= 1.
    """
    if beta <= -1:
        raise ValueError(f"weight exponent must exceed -1, got {beta}")
    angular = 2.0 * math.pi if l == 0 else math.pi
    return math.sqrt(angular * 0.25 * 2.0 ** (-beta - l)) * jacobi_norm(n, beta, l)


def disk_quadrature(beta, radial_nodes, angular_nodes):
    """Tensor rule for int_disk g(x, y) (1 - r^2)^beta dA.

    Gauss-Jacobi in t = 2r^2 - 1 absorbs the weight; the angle uses the
    uniform periodic trapezoid rule.

    Returns:
        x, y, w: flat arrays of nodes and weights.
    """
    t, wt = roots_jacobi(radial_nodes, beta, 0.0)
    phi = 2.0 * math.pi * np.arange(angular_nodes) / angular_nodes
    r = np.sqrt((1.0 + t) / 2.0)
    rr, pp = np.meshgrid(r, phi, indexing="ij")
    w = np.outer(wt * 0.25 * 2.0 ** (-beta), np.full(angular_nodes, 2.0 * math.pi / angular_nodes))
    return (rr * np.cos(pp)).ravel(), (rr * np.sin(pp)).ravel(), w.ravel()


def _min_nodes(max_l, max_n):
    return max_n + (max_l + 2) // 2, 2 * max_l + 2


def project(f, beta, max_l, max_n, radial_nodes=None, angular_nodes=None):
    """Orthogonal projection of ``f`` onto indices l <= max_l, n <= max_n.

    Args:
        f: vectorised callable f(x, y).
        beta: weight exponent of the target space.
        radial_nodes, angular_nodes: quadrature sizes; defaults leave 8 nodes
            of headroom over the minimum that integrates band-limited
            products exactly.

    Returns:
        raw-convention CoefficientField holding every retained index.
    """
    min_r, min_a = _min_nodes(max_l, max_n)
    radial_nodes = min_r + 8 if radial_nodes is None else radial_nodes
    angular_nodes = min_a + 6 if angular_nodes is None else angular_nodes
    if radial_nodes < min_r or angular_nodes < min_a:
        raise ResolutionError(
            f"projection to l<={max_l}, n<={max_n} needs at least {min_r} radial "
            f"and {min_a} angular nodes (got {radial_nodes}, {angular_nodes})")
    x, y, w = disk_quadrature(beta, radial_nodes, angular_nodes)
    fw = np.asarray(f(x, y), dtype=float) * w
    t = 2.0 * (x * x + y * y) - 1.0
    entries = {}
    for l in range(max_l + 1):
        table = jacobi_table(max_n, beta, l, t)
        for mu in ((1,) if l == 0 else (1, -1)):
            harmonic = eval_solid_harmonic(l, mu, x, y)
            for n in range(max_n + 1):
                inner = float(np.dot(fw, harmonic * table[n]))
                entries[BasisIndex(l, n, mu)] = inner / basis_norm_h(l, n, beta) ** 2
    return CoefficientField(entries, beta, "raw")


def format_coefficients(c):
    """Serialise a field to the ``mu,l,n,value`` CSV text format."""
    buf = io.StringIO()
    buf.write(f"# beta={c.beta!r} convention={c.convention}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["mu", "l", "n", "value"])
    for idx, value in c.items():
        if value != 0.0:
            writer.writerow([idx.mu, idx.l, idx.n, repr(float(value))])
    return buf.getvalue()


def parse_coefficients(text, beta=None, convention=None):
    """Inverse of :func:`format_coefficients`.

    A missing metadata comment falls back to the ``beta``/``convention``
    arguments; an empty document gives an empty field.
    """
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            for token in line[1:].split():
                if "=" in token:
                    key, value = token.split("=", 1)
                    meta[key] = value
        elif line.strip():
            body.append(line)
    beta = float(meta["beta"]) if "beta" in meta else (0.0 if beta is None else beta)
    convention = meta.get("convention", convention or "raw")
    entries = {}
    if body:
        reader = csv.DictReader(body)
        if reader.fieldnames != ["mu", "l", "n", "value"]:
            raise ValueError(f"bad coefficient header {reader.fieldnames}")
        for row in reader:
            idx = BasisIndex(int(row["l"]), int(row["n"]), int(row["mu"]))
            entries[idx] = entries.get(idx, 0.0) + float(row["value"])
    return CoefficientField(entries, beta, convention)


def write_coefficients(path, c):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_coefficients(c))


def read_coefficients(path, beta=None, convention=None):
    with open(path, encoding="utf-8") as fh:
        return parse_coefficients(fh.read(), beta, convention)
