"""Desk-scale lift of orthonormal families from K to a truncated K*A*N model.

The compact factor K is a circle model; the A and N factors are truncated
real intervals with uniform grids and a joint product measure.  A lift
profile f on the AN grid satisfies

  (i)  f = 0 at the node representing the AN identity (the grid node nearest
       the coordinate origin), enforced exactly by an additive shift;
  (ii) the integral of exp(2 Re f) against the AN measure equals 1, enforced
       by rescaling the product weights.

Lifted members chi(k, an) = exp(f(an)) * xi(k) then restrict to xi on K
bitwise and inherit the Gram matrix of xi.

The pointwise reproduction identity that would force exp(f) == 1 everywhere
is not enforced; ``reproduction_residual`` measures it for separable
functions instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import RepCatalog
from .groups import GroupModel, make_group, same_group
from .hilbert import (
    ExpansionWeights,
    FamilyBlock,
    L2Function,
    OrthonormalFamily,
)
from .semicomplete import SemicompletenessReport, semicompleteness_defect


@dataclass(eq=False)
class IwasawaModel:
    """Circle K factor plus truncated AN product grid and lift profile."""

    K: GroupModel
    a_nodes: np.ndarray
    n_nodes: np.ndarray
    an_weights: np.ndarray       # (nA * nN,) rescaled so condition (ii) holds
    profile: np.ndarray          # (nA * nN,) complex, exactly 0 at id_index
    id_index: int                # flat AN index of the identity node
    profile_name: str

    @property
    def n_an(self) -> int:
        return len(self.an_weights)

    def condition_i_residual(self) -> float:
        return float(abs(self.profile[self.id_index]))

    def condition_ii_residual(self) -> float:
        density = np.exp(2.0 * np.real(self.profile))
        return float(abs(np.dot(self.an_weights, density) - 1.0))


def _grid(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    if not (lo < hi):
        raise ValueError(f"degenerate range [{lo}, {hi}]")
    if n < 1:
        raise ValueError(f"grid size must be positive, got {n}")
    if not (lo <= 0.0 <= hi):
        raise ValueError(f"range [{lo}, {hi}] excludes the identity coordinate 0")
    h = (hi - lo) / n
    nodes = lo + (np.arange(n) + 0.5) * h
    return nodes, np.full(n, h)


def make_iwasawa_model(
    k_spec: str,
    a_range: tuple[float, float],
    n_range: tuple[float, float],
    a_size: int,
    n_size: int,
    profile: str = "uniform",
) -> IwasawaModel:
    """Build the truncated model; the profile is renormalized on construction.

    ``profile`` is ``uniform``, ``gauss:sigma=S``, or ``table:PATH`` (a text
    file with a_size rows of n_size real values).
    """
    K = make_group(k_spec)
    if K.kind != "circle":
        raise ValueError(f"K factor must be a circle model, got {k_spec!r}")
    a_nodes, a_w = _grid(a_range[0], a_range[1], a_size)
    n_nodes, n_w = _grid(n_range[0], n_range[1], n_size)
    an_weights = np.outer(a_w, n_w).reshape(-1)

    aa, nn = np.meshgrid(a_nodes, n_nodes, indexing="ij")
    id_index = int(np.argmin(aa.reshape(-1) ** 2 + nn.reshape(-1) ** 2))

    name = profile.strip()
    head, _, rest = name.partition(":")
    head = head.lower()
    if head == "uniform":
        raw = np.zeros(a_size * n_size, dtype=np.complex128)
    elif head == "gauss":
        sigma = 1.0
        for part in filter(None, rest.split(",")):
            key, sep, val = part.partition("=")
            if not sep or key.strip().lower() != "sigma":
                raise ValueError(f"malformed gauss profile parameter {part!r}")
            sigma = float(val)
        if sigma <= 0:
            raise ValueError(f"gauss profile needs sigma > 0, got {sigma}")
        raw = (-(aa**2 + nn**2) / (4.0 * sigma * sigma)).reshape(-1).astype(np.complex128)
    elif head == "table":
        table = np.loadtxt(rest, dtype=float, ndmin=2)
        if table.shape != (a_size, n_size):
            raise ValueError(
                f"profile table shape {table.shape} does not match grid ({a_size}, {n_size})"
            )
        raw = table.reshape(-1).astype(np.complex128)
    else:
        raise ValueError(f"unknown profile {profile!r}")

    shifted = raw - raw[id_index]          # condition (i), exact
    mass = float(np.dot(an_weights, np.exp(2.0 * np.real(shifted))))
    if not math.isfinite(mass) or mass <= 0:
        raise ValueError(f"profile {profile!r} is not normalizable on the range")
    return IwasawaModel(
        K=K,
        a_nodes=a_nodes,
        n_nodes=n_nodes,
        an_weights=an_weights / mass,      # condition (ii)
        profile=shifted,
        id_index=id_index,
        profile_name=name,
    )


@dataclass(eq=False)
class LiftedFamily:
    """Functions chi(k, an) = exp(f(an)) xi(k) on the K x AN product grid.

    Product nodes are ordered K-major: flat index = k * n_an + an.
    """

    model: IwasawaModel
    source: OrthonormalFamily
    members: np.ndarray          # (n_members, nK * nAN)
    weights: np.ndarray          # (nK * nAN,) product measure

    @property
    def blocks(self) -> tuple[FamilyBlock, ...]:
        return self.source.blocks

    def gram_matrix(self) -> np.ndarray:
        from . import _kernels

        return _kernels.gram(self.members, self.weights)

    def restrict_to_k(self) -> OrthonormalFamily:
        """The family of restrictions chi(., identity AN node) on K."""
        n_an = self.model.n_an
        values = self.members[:, self.model.id_index :: n_an]
        return OrthonormalFamily(
            group=self.model.K, blocks=self.source.blocks, members=values.copy()
        )


def lift_family(model: IwasawaModel, xi: OrthonormalFamily) -> LiftedFamily:
    """Lift an orthonormal family on K through the profile."""
    if not same_group(xi.group, model.K):
        raise ValueError(
            f"family lives on {xi.group.name}, model K factor is {model.K.name}"
        )
    envelope = np.exp(model.profile)                     # (nAN,)
    members = (xi.members[:, :, None] * envelope[None, None, :]).reshape(
        xi.n_members, -1
    )
    weights = (xi.group.weights[:, None] * model.an_weights[None, :]).reshape(-1)
    return LiftedFamily(model=model, source=xi, members=members, weights=weights)


def check_K_semicomplete(
    lifted: LiftedFamily,
    cat_k: RepCatalog,
    weights: ExpansionWeights,
    testset: list[L2Function],
    epsilon: float | None = None,
    test_set_name: str = "explicit",
    function_ids: list[str] | None = None,
) -> SemicompletenessReport:
    """Semicompleteness defect of the lifted family's restriction to K."""
    restricted = lifted.restrict_to_k()
    return semicompleteness_defect(
        restricted,
        weights,
        cat_k,
        testset,
        epsilon=epsilon,
        test_set_name=test_set_name,
        function_ids=function_ids,
    )


def reproduction_residual(
    model: IwasawaModel, g0: L2Function | None = None, an_index: int | None = None
) -> float:
    """Residual of the pointwise reproduction identity for separable g.

    For g(k, an) = g0(k) exp(f(an)) and a reference node (a1, n1), computes
    max over k of | integral_AN g(k, an) exp(conj(f(an)) + f(a1 n1)) dadn -
    g0(k) |.  The residual vanishes for every reference node only when the
    profile is identically zero.
    """
    if g0 is None:
        g0 = L2Function(model.K, np.ones(model.K.n_nodes, dtype=np.complex128))
    idx = model.id_index if an_index is None else int(an_index)
    if not (0 <= idx < model.n_an):
        raise IndexError(f"AN node index {idx} out of range")
    factor = complex(
        np.dot(model.an_weights, np.exp(model.profile + np.conj(model.profile)))
        * np.exp(model.profile[idx])
    )
    return float(np.max(np.abs(g0.values * factor - g0.values)))


def max_reproduction_residual(model: IwasawaModel, g0: L2Function | None = None) -> float:
    """Largest reproduction residual over all reference AN nodes."""
    return max(
        reproduction_residual(model, g0=g0, an_index=k) for k in range(model.n_an)
    )
