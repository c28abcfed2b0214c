"""Concrete compact groups with exact or quadrature-based Haar integration.

Three families are supported:

* finite groups (cyclic ``zn:N``, dihedral ``dihedral:N``, symmetric
  ``sym:N`` for N in {3, 4}) -- elements are indices into an explicit element
  list, multiplication is a precomputed table, Haar measure is uniform and
  integration is exact;
* the circle ``circle:N`` -- N uniform angle nodes, trapezoid-free uniform
  weights; exact for trigonometric polynomials of degree < N;
* SU(2) ``su2:j=J[,quad=Q]`` -- a product Euler-angle grid, uniform in the
  two torus angles and Gauss-Legendre in cos(beta), exact for matrix
  coefficients up to the stored spin capacity.

Weights are always stored explicitly and sum to 1, so every L2 inner product
downstream is a plain weighted dot product over the node grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(eq=False)
class GroupModel:
    """A compact group discretized on a fixed quadrature grid.

    The per-kind payload fields are mutually exclusive: finite groups carry a
    multiplication ``table``, the circle carries ``thetas``, SU(2) carries the
    node ``matrices`` (and their Euler angles).  ``capacity`` is the largest
    irrep magnitude the quadrature integrates exactly (None for finite groups,
    whose integration is exact outright).
    """

    kind: str                     # "finite" | "circle" | "su2"
    name: str                     # canonical spec string, e.g. "zn:12"
    weights: np.ndarray           # (n_nodes,) normalized Haar weights
    identity: object
    table: np.ndarray | None = None           # finite: (n, n) index table
    element_names: tuple[str, ...] | None = None
    thetas: np.ndarray | None = None          # circle: (n_nodes,) angles
    matrices: np.ndarray | None = None        # su2: (n_nodes, 2, 2)
    eulers: np.ndarray | None = None          # su2: (n_nodes, 3)
    capacity: float | None = None

    @property
    def n_nodes(self) -> int:
        return len(self.weights)

    @property
    def order(self) -> int:
        """Group order; only meaningful for finite groups."""
        if self.kind != "finite":
            raise ValueError(f"{self.name} is not a finite group")
        return self.n_nodes

    def node_element(self, k: int):
        """The group element sitting at quadrature node k."""
        if self.kind == "finite":
            return int(k)
        if self.kind == "circle":
            return float(self.thetas[k])
        return self.matrices[k]

    def multiply(self, a, b):
        """Group product a*b in the element encoding of this group kind."""
        if self.kind == "finite":
            return int(self.table[a, b])
        if self.kind == "circle":
            return (a + b) % TWO_PI
        return a @ b


def same_group(g1: GroupModel, g2: GroupModel) -> bool:
    return g1 is g2 or (g1.kind == g2.kind and g1.name == g2.name and g1.n_nodes == g2.n_nodes)


def require_same_group(g1: GroupModel, g2: GroupModel) -> None:
    if not same_group(g1, g2):
        raise ValueError(f"group mismatch: {g1.name} vs {g2.name}")


# ---------------------------------------------------------------------------
# finite groups


def _finite_model(name: str, elements: list, compose, identity_elem) -> GroupModel:
    index = {e: i for i, e in enumerate(elements)}
    n = len(elements)
    table = np.empty((n, n), dtype=np.int64)
    for i, a in enumerate(elements):
        for j, b in enumerate(elements):
            table[i, j] = index[compose(a, b)]
    return GroupModel(
        kind="finite",
        name=name,
        weights=np.full(n, 1.0 / n),
        identity=index[identity_elem],
        table=table,
        element_names=tuple(str(e) for e in elements),
    )


def cyclic_group(n: int) -> GroupModel:
    if n < 1:
        raise ValueError(f"cyclic group needs n >= 1, got {n}")
    return _finite_model(f"zn:{n}", list(range(n)), lambda a, b: (a + b) % n, 0)


def dihedral_group(n: int) -> GroupModel:
    """Dihedral group of order 2n; elements are (flip, rotation) pairs."""
    if n < 3:
        raise ValueError(f"dihedral group needs n >= 3, got {n}")
    elements = [(f, r) for f in (0, 1) for r in range(n)]

    def compose(x, y):
        # s^f1 r^k1 * s^f2 r^k2 = s^(f1+f2) r^((-1)^f2 k1 + k2)
        f1, k1 = x
        f2, k2 = y
        sign = -1 if f2 else 1
        return ((f1 + f2) % 2, (sign * k1 + k2) % n)

    return _finite_model(f"dihedral:{n}", elements, compose, (0, 0))


def symmetric_group(n: int) -> GroupModel:
    """Symmetric group on n letters, n in {3, 4}; elements are permutation tuples."""
    if n not in (3, 4):
        raise ValueError(f"symmetric group supported for n in {{3, 4}}, got {n}")
    elements = sorted(permutations(range(n)))

    def compose(p, q):
        # (p*q)(x) = p(q(x))
        return tuple(p[q[x]] for x in range(n))

    return _finite_model(f"sym:{n}", elements, compose, tuple(range(n)))


# ---------------------------------------------------------------------------
# circle


def circle_group(n_nodes: int) -> GroupModel:
    if n_nodes < 1:
        raise ValueError(f"circle needs at least one node, got {n_nodes}")
    thetas = TWO_PI * np.arange(n_nodes) / n_nodes
    return GroupModel(
        kind="circle",
        name=f"circle:{n_nodes}",
        weights=np.full(n_nodes, 1.0 / n_nodes),
        identity=0.0,
        thetas=thetas,
        capacity=float((n_nodes - 1) // 2),
    )


# ---------------------------------------------------------------------------
# SU(2)


def su2_matrix_from_euler(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """SU(2) element for z-y-z Euler angles; rows/cols ordered m = +1/2, -1/2."""
    c = math.cos(beta / 2.0)
    s = math.sin(beta / 2.0)
    a = c * np.exp(-0.5j * (alpha + gamma))
    b = -s * np.exp(-0.5j * (alpha - gamma))
    return np.array([[a, b], [-np.conj(b), np.conj(a)]], dtype=np.complex128)


def su2_group(jmax: float, quad: int | None = None) -> GroupModel:
    """SU(2) on an Euler product grid exact for spins up to ``jmax``.

    The torus angles use uniform grids (alpha over [0, 2pi), gamma over
    [0, 4pi) to cover half-integer frequencies); cos(beta) uses Gauss-Legendre
    nodes.  Grid sizes default to the smallest counts that integrate all
    matrix-coefficient products up to jmax exactly: 2*jmax+1 Gauss nodes and
    4*jmax+1 uniform nodes per torus angle.
    """
    two_j = int(round(2 * jmax))
    if two_j < 0 or abs(2 * jmax - two_j) > 1e-12:
        raise ValueError(f"su2 jmax must be a nonnegative half-integer, got {jmax}")
    n_beta = quad if quad is not None else two_j + 1
    n_torus = max(2 * n_beta - 1, 2 * two_j + 1)
    if n_beta < two_j + 1:
        raise ValueError(
            f"su2 quadrature order {n_beta} too small for jmax={jmax}; need >= {two_j + 1}"
        )
    x, glw = np.polynomial.legendre.leggauss(n_beta)
    betas = np.arccos(x)
    alphas = TWO_PI * np.arange(n_torus) / n_torus
    gammas = 2.0 * TWO_PI * np.arange(n_torus) / n_torus

    n_nodes = n_torus * n_beta * n_torus
    matrices = np.empty((n_nodes, 2, 2), dtype=np.complex128)
    eulers = np.empty((n_nodes, 3))
    weights = np.empty(n_nodes)
    idx = 0
    for ia, al in enumerate(alphas):
        for ib, be in enumerate(betas):
            for ic, ga in enumerate(gammas):
                matrices[idx] = su2_matrix_from_euler(al, be, ga)
                eulers[idx] = (al, be, ga)
                weights[idx] = glw[ib] / (2.0 * n_torus * n_torus)
                idx += 1
    return GroupModel(
        kind="su2",
        name=f"su2:j={_fmt_spin(jmax)},quad={n_beta}",
        weights=weights,
        identity=np.eye(2, dtype=np.complex128),
        matrices=matrices,
        eulers=eulers,
        capacity=float(jmax),
    )


def _fmt_spin(j: float) -> str:
    return str(int(j)) if float(j).is_integer() else str(j)


# ---------------------------------------------------------------------------
# spec parsing and integration


def make_group(spec: str) -> GroupModel:
    """Build a group from a spec string.

    Accepted forms: ``zn:N``, ``dihedral:N``, ``sym:N``, ``circle:N``,
    ``su2:j=J[,quad=Q]``.
    """
    spec = spec.strip()
    head, sep, rest = spec.partition(":")
    if not sep:
        raise ValueError(f"unsupported group spec {spec!r}")
    head = head.lower()
    try:
        if head == "zn":
            return cyclic_group(int(rest))
        if head == "dihedral":
            return dihedral_group(int(rest))
        if head == "sym":
            return symmetric_group(int(rest))
        if head == "circle":
            return circle_group(int(rest))
        if head == "su2":
            jmax = None
            quad = None
            for part in rest.split(","):
                key, psep, val = part.partition("=")
                if not psep:
                    raise ValueError(f"malformed su2 parameter {part!r}")
                key = key.strip().lower()
                if key == "j":
                    jmax = float(val)
                elif key == "quad":
                    quad = int(val)
                else:
                    raise ValueError(f"unknown su2 parameter {key!r}")
            if jmax is None:
                raise ValueError("su2 spec needs j=<spin>")
            return su2_group(jmax, quad)
    except ValueError:
        raise
    except Exception as exc:
        raise ValueError(f"unsupported group spec {spec!r}: {exc}") from exc
    raise ValueError(f"unsupported group spec {spec!r}")


def haar_integrate(group: GroupModel, phi) -> complex:
    """Normalized Haar integral of ``phi``.

    ``phi`` is either a callable evaluated at every quadrature node element or
    an array of values already sampled on the grid.
    """
    if callable(phi):
        values = np.array(
            [phi(group.node_element(k)) for k in range(group.n_nodes)], dtype=np.complex128
        )
    else:
        values = np.asarray(phi, dtype=np.complex128)
        if values.shape != (group.n_nodes,):
            raise ValueError(
                f"expected {group.n_nodes} sampled values, got shape {values.shape}"
            )
    return complex(np.dot(group.weights, values))
