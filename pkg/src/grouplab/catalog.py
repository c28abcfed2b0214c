"""Catalog of irreducible unitary representations up to a truncation.

Exposes the dual object of a group model as an ordered list of labels with
degrees d and an ordering magnitude |.|, plus the matrix coefficients
u_ij(g) as functions on the group:

* finite groups -- irreps are constructed, not tabulated: a random Hermitian
  matrix is averaged over the left regular representation, its eigenspaces
  (which are invariant subspaces) are orthonormalized and restricted, copies
  are deduplicated by character, and the result is validated against Schur
  orthogonality and the dimension count sum(d^2) = |G|;
* circle -- characters exp(i m theta) for |m| <= M;
* SU(2) -- spin-j Wigner matrices for j = 0, 1/2, ..., jmax, evaluated from
  the Cayley-Klein parameters of the 2x2 element so that products of grid
  elements can be evaluated without Euler-angle extraction.

Matrix coefficients are cached on the quadrature grid at build time; every
downstream inner product is then a plain weighted dot product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .groups import GroupModel
from .hilbert import OrthonormalFamily, family_from_block_grids


@dataclass(frozen=True)
class IrrepLabel:
    """A dual-object element: group kind, payload, degree d, magnitude |.|."""

    kind: str        # "finite" | "circle" | "su2"
    payload: object  # finite: catalog index; circle: frequency m; su2: spin j
    degree: int
    magnitude: float

    @property
    def key(self) -> str:
        if self.kind == "finite":
            return f"irrep:{self.payload}"
        if self.kind == "circle":
            return f"m:{self.payload}"
        j = self.payload
        return f"j:{int(j)}" if float(j).is_integer() else f"j:{j}"


@dataclass(eq=False)
class RepCatalog:
    """Ordered irrep labels with matrix-coefficient grids cached per label."""

    group: GroupModel
    labels: tuple[IrrepLabel, ...]
    grids: dict[str, np.ndarray]   # key -> (n_nodes, d, d)

    def label_by_key(self, key: str) -> IrrepLabel:
        for lab in self.labels:
            if lab.key == key:
                return lab
        raise KeyError(f"label {key!r} not in catalog")

    def coefficient_grid(self, label: IrrepLabel) -> np.ndarray:
        return self.grids[label.key]

    def coefficient_matrix(self, label: IrrepLabel, g) -> np.ndarray:
        """u(g) for an arbitrary group element (not necessarily a grid node)."""
        if label.key not in self.grids:
            raise KeyError(f"label {label.key!r} not in catalog")
        if self.group.kind == "finite":
            return self.grids[label.key][int(g)]
        if self.group.kind == "circle":
            return np.array([[np.exp(1j * label.payload * g)]], dtype=np.complex128)
        return su2_irrep_matrix(int(round(2 * label.payload)), np.asarray(g))

    @property
    def total_dimension(self) -> int:
        return sum(lab.degree * lab.degree for lab in self.labels)


def matrix_coefficient(cat: RepCatalog, label: IrrepLabel, i: int, j: int, g) -> complex:
    """Entry (i, j) of u(g), 0-based; raises IndexError outside the degree."""
    d = label.degree
    if not (0 <= i < d and 0 <= j < d):
        raise IndexError(f"coefficient index ({i}, {j}) out of range for degree {d}")
    return complex(cat.coefficient_matrix(label, g)[i, j])


def peter_weyl_basis(cat: RepCatalog) -> OrthonormalFamily:
    """The orthonormal family {sqrt(d) u_ij} over all catalog labels."""
    grids = []
    for lab in cat.labels:
        grid = cat.grids[lab.key]  # (n_nodes, d, d)
        scaled = math.sqrt(lab.degree) * np.transpose(grid, (1, 2, 0))
        grids.append((lab.key, scaled))
    return family_from_block_grids(cat.group, grids)


# ---------------------------------------------------------------------------
# SU(2) Wigner matrices


def su2_irrep_matrix(two_j: int, g: np.ndarray) -> np.ndarray:
    """Spin-j representation matrix from the Cayley-Klein parameters of g.

    g is an SU(2) matrix [[a, b], [-conj(b), conj(a)]]; rows and columns are
    ordered m = j, j-1, ..., -j, which makes two_j == 1 return g itself.  The
    formula is the action on homogeneous polynomials of degree 2j, so it is a
    polynomial in (a, b) and their conjugates and is exactly multiplicative.
    """
    a = complex(g[0, 0])
    b = complex(g[0, 1])
    ac = a.conjugate()
    bc = b.conjugate()
    d = two_j + 1
    out = np.zeros((d, d), dtype=np.complex128)
    fact = [math.factorial(t) for t in range(two_j + 1)]
    for r in range(d):          # p' = j + m'
        pp = two_j - r
        qp = r
        for c in range(d):      # p = j + m
            p = two_j - c
            q = c
            pref = math.sqrt(fact[pp] * fact[qp] * fact[p] * fact[q])
            lo = max(0, p + pp - two_j)
            hi = min(p, pp)
            acc = 0.0 + 0.0j
            for k in range(lo, hi + 1):
                term = (a ** k) * ((-bc) ** (p - k)) * (b ** (pp - k)) * (
                    ac ** (k - p - pp + two_j)
                )
                acc += term / (fact[k] * fact[p - k] * fact[pp - k] * fact[k - p - pp + two_j])
            out[r, c] = pref * acc
    return out


# ---------------------------------------------------------------------------
# finite-group irreps from the regular representation

_FINITE_SEED = 0x5EED
_CHAR_ROUND = 6


def _averaged_commutant(table: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    n = table.shape[0]
    x = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = x + x.conj().T
    t = np.zeros((n, n), dtype=np.complex128)
    for g in range(n):
        perm = table[g, :]
        # (L_g H L_g^T)[perm[i], perm[j]] = H[i, j]
        t[np.ix_(perm, perm)] += h
    return t / n


def _cluster_eigs(vals: np.ndarray, tol: float) -> list[np.ndarray]:
    order = np.argsort(vals)
    clusters = [[order[0]]]
    for idx in order[1:]:
        if vals[idx] - vals[clusters[-1][-1]] < tol:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    return [np.array(c) for c in clusters]


def _finite_irreps(table: np.ndarray, max_tries: int = 12) -> list[np.ndarray]:
    """Distinct unitary irreps of a finite group as (|G|, d, d) grids.

    Returns one representative per equivalence class, each entry grid[g] being
    the representation matrix of element g.
    """
    n = table.shape[0]
    rng = np.random.default_rng(_FINITE_SEED + 977 * n)
    for _ in range(max_tries):
        t = _averaged_commutant(table, rng)
        vals, vecs = np.linalg.eigh(t)
        spread = max(float(vals[-1] - vals[0]), 1.0)
        clusters = _cluster_eigs(vals, 1e-6 * spread)
        reps = []
        ok = True
        for cluster in clusters:
            basis, _ = np.linalg.qr(vecs[:, cluster])
            d = basis.shape[1]
            grid = np.empty((n, d, d), dtype=np.complex128)
            for g in range(n):
                # L_g basis: row permutation e_h -> e_{g h}
                lb = np.zeros_like(basis)
                lb[table[g, :], :] = basis
                grid[g] = basis.conj().T @ lb
            # irreducibility: mean |character|^2 == 1
            chars = np.einsum("gii->g", grid)
            if abs(np.mean(np.abs(chars) ** 2) - 1.0) > 1e-6:
                ok = False
                break
            reps.append((grid, chars))
        if not ok:
            continue
        # deduplicate equivalent copies by character
        classes: list[tuple[np.ndarray, np.ndarray, int]] = []
        for grid, chars in reps:
            for k, (_, ref_chars, _) in enumerate(classes):
                if ref_chars.shape == chars.shape and np.max(np.abs(ref_chars - chars)) < 1e-6:
                    classes[k] = (classes[k][0], classes[k][1], classes[k][2] + 1)
                    break
            else:
                classes.append((grid, chars, 1))
        if sum(g.shape[1] ** 2 for g, _, _ in classes) != n:
            continue
        if any(mult != grid.shape[1] for grid, _, mult in classes):
            continue
        # Schur orthogonality across the deduplicated catalog
        rows = np.vstack(
            [
                math.sqrt(grid.shape[1]) * grid.reshape(n, -1).T
                for grid, _, _ in classes
            ]
        )
        gram = (rows / n) @ rows.conj().T
        if np.max(np.abs(gram - np.eye(n))) > 1e-10:
            continue
        # deterministic order: trivial first, then by degree and character key
        def sort_key(entry):
            grid, chars, _ = entry
            d = grid.shape[1]
            rounded = tuple(
                (round(c.real, _CHAR_ROUND), round(c.imag, _CHAR_ROUND)) for c in chars
            )
            trivial = d == 1 and np.max(np.abs(chars - 1.0)) < 1e-6
            return (0 if trivial else 1, d, rounded)

        classes.sort(key=sort_key)
        return [grid for grid, _, _ in classes]
    raise RuntimeError("failed to decompose the regular representation; increase max_tries")


# ---------------------------------------------------------------------------
# catalog construction


def build_catalog(
    group: GroupModel,
    truncation: float | None = None,
    max_count: int | None = None,
) -> RepCatalog:
    """Enumerate irreps with magnitude <= truncation (complete for finite groups).

    ``truncation`` is the maximum magnitude (circle frequency bound M, SU(2)
    spin bound jmax); it defaults to, and may not exceed, the group's
    quadrature capacity.  Finite groups always get their complete dual and
    ignore ``truncation``.  ``max_count`` optionally trims the ordered list.
    """
    if group.kind == "finite":
        grids = _finite_irreps(group.table)
        labels = []
        cache = {}
        for idx, grid in enumerate(grids):
            lab = IrrepLabel(
                kind="finite", payload=idx, degree=grid.shape[1], magnitude=float(idx)
            )
            labels.append(lab)
            cache[lab.key] = grid
        if sum(l.degree**2 for l in labels) != group.order:
            raise RuntimeError(f"irrep dimension count failed for {group.name}")
    elif group.kind == "circle":
        m_max = int(group.capacity if truncation is None else truncation)
        if m_max > group.capacity:
            raise ValueError(
                f"truncation M={m_max} exceeds quadrature capacity {int(group.capacity)} "
                f"of {group.name}"
            )
        ms = sorted(range(-m_max, m_max + 1), key=lambda m: (abs(m), m))
        labels = [
            IrrepLabel(kind="circle", payload=m, degree=1, magnitude=float(abs(m))) for m in ms
        ]
        cache = {
            lab.key: np.exp(1j * lab.payload * group.thetas).reshape(-1, 1, 1)
            for lab in labels
        }
    elif group.kind == "su2":
        jmax = group.capacity if truncation is None else float(truncation)
        if jmax > group.capacity + 1e-12:
            raise ValueError(
                f"truncation jmax={jmax} exceeds quadrature capacity {group.capacity} "
                f"of {group.name}"
            )
        two_js = range(0, int(round(2 * jmax)) + 1)
        labels = []
        cache = {}
        for two_j in two_js:
            j = two_j / 2.0
            lab = IrrepLabel(kind="su2", payload=j, degree=two_j + 1, magnitude=j)
            labels.append(lab)
            grid = np.empty((group.n_nodes, two_j + 1, two_j + 1), dtype=np.complex128)
            for k in range(group.n_nodes):
                grid[k] = su2_irrep_matrix(two_j, group.matrices[k])
            cache[lab.key] = grid
    else:
        raise ValueError(f"unsupported group kind {group.kind!r}")

    if max_count is not None:
        labels = labels[:max_count]
        cache = {lab.key: cache[lab.key] for lab in labels}
    return RepCatalog(group=group, labels=tuple(labels), grids=cache)
