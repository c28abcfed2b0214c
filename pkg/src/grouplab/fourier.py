"""Fourier transform to matrix coefficients, synthesis, and block projections.

The transform of f maps each catalog label to the matrix of inner products
against the raw (unnormalized) coefficients u_ij; synthesis weights each block
by its degree, so on a finite group with the complete catalog the round trip
is the identity, and on a truncated continuous catalog it is the band-limited
projection.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .catalog import IrrepLabel, RepCatalog
from .groups import require_same_group
from .hilbert import L2Function


@dataclass(eq=False)
class FourierCoefficients:
    """Per-label coefficient matrices fhat[key][i, j] = <f, u_ij>."""

    catalog: RepCatalog
    matrices: dict[str, np.ndarray]

    def norm_sq(self) -> float:
        """Plancherel sum: sum_label d * sum_ij |fhat_ij|^2."""
        total = 0.0
        for lab in self.catalog.labels:
            total += lab.degree * float(np.sum(np.abs(self.matrices[lab.key]) ** 2))
        return total

    def block_norms(self) -> dict[str, float]:
        """Hilbert-Schmidt norm per label."""
        return {
            lab.key: float(np.sqrt(np.sum(np.abs(self.matrices[lab.key]) ** 2)))
            for lab in self.catalog.labels
        }


def fourier_transform(f: L2Function, cat: RepCatalog) -> FourierCoefficients:
    """fhat(label)_ij = <f, u_ij> for every label in the catalog."""
    require_same_group(f.group, cat.group)
    w = cat.group.weights
    matrices = {}
    for lab in cat.labels:
        d = lab.degree
        grid = cat.grids[lab.key].reshape(cat.group.n_nodes, d * d).T
        coeffs = _kernels.coefficients_against(grid, w, f.values)
        matrices[lab.key] = coeffs.reshape(d, d)
    return FourierCoefficients(catalog=cat, matrices=matrices)


def synthesize(fhat: FourierCoefficients, cat: RepCatalog) -> L2Function:
    """sum_label d * sum_ij fhat_ij u_ij as a function on the grid."""
    if fhat.catalog is not cat and set(fhat.matrices) != {lab.key for lab in cat.labels}:
        raise ValueError("coefficient labels do not match the catalog")
    out = np.zeros(cat.group.n_nodes, dtype=np.complex128)
    for lab in cat.labels:
        d = lab.degree
        mat = np.asarray(fhat.matrices[lab.key], dtype=np.complex128)
        if mat.shape != (d, d):
            raise ValueError(
                f"block {lab.key!r} has shape {mat.shape}, expected {(d, d)}"
            )
        grid = cat.grids[lab.key].reshape(cat.group.n_nodes, d * d).T
        out += _kernels.combine(d * mat.reshape(d * d), grid)
    return L2Function(cat.group, out)


def block_project(f: L2Function, cat: RepCatalog, label: IrrepLabel, i: int) -> L2Function:
    """Orthogonal projection of f onto span{u_ij : j} for row i of one label."""
    require_same_group(f.group, cat.group)
    d = label.degree
    if not (0 <= i < d):
        raise IndexError(f"row {i} out of range for degree {d}")
    grid = cat.grids[label.key]           # (n_nodes, d, d)
    row = np.ascontiguousarray(grid[:, i, :].T)   # (d, n_nodes): u_ij for j = 0..d-1
    w = cat.group.weights
    coeffs = _kernels.coefficients_against(row, w, f.values)
    return L2Function(cat.group, _kernels.combine(d * coeffs, row))


def inversion_defect(f: L2Function, cat: RepCatalog) -> float:
    """L2 norm of f - synthesize(fourier_transform(f)); 0 for complete catalogs."""
    return (f - synthesize(fourier_transform(f, cat), cat)).norm()
