"""Torus lattice geometry and fixed-number occupation bases.

Sites of an Nx x Ny torus are indexed ``i = x + Nx * y`` (row-major in y).
A manifold basis enumerates all occupation vectors with a fixed total photon
number and a per-site cap, in ascending lexicographic order of the occupation
tuple ``(occ_0, ..., occ_{Ns-1})``.  Rank 0 is therefore the lexicographically
smallest state (all photons pushed to the highest site indices).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from .errors import BasisError, GeometryError


@dataclass(frozen=True)
class LatticeGeometry:
    """Torus dimensions plus the number of flux quanta through the surface.

    The flux density per plaquette is stored exactly as a rational number,
    ``alpha = nphi / (nx * ny)``, so half-filling bookkeeping never suffers
    float drift.
    """

    nx: int
    ny: int
    nphi: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise GeometryError(f"lattice dimensions must be positive, got {self.nx}x{self.ny}")
        if not isinstance(self.nphi, (int, np.integer)):
            raise GeometryError(f"flux count must be an integer, got {self.nphi!r}")

    @property
    def n_sites(self) -> int:
        return self.nx * self.ny

    @property
    def alpha(self) -> Fraction:
        return Fraction(self.nphi, self.nx * self.ny)

    def site_index(self, x: int, y: int) -> int:
        """Site index for coordinates taken modulo the torus."""
        return (x % self.nx) + self.nx * (y % self.ny)

    def site_xy(self, i: int) -> tuple[int, int]:
        if not 0 <= i < self.n_sites:
            raise GeometryError(f"site index {i} outside 0..{self.n_sites - 1}")
        return i % self.nx, i // self.nx


def build_geometry(nx: int, ny: int, nphi: int) -> LatticeGeometry:
    return LatticeGeometry(int(nx), int(ny), int(nphi))


@dataclass(frozen=True)
class OccupationState:
    """A single occupation vector with its total photon number."""

    occ: tuple[int, ...]
    total: int

    @classmethod
    def from_occ(cls, occ) -> "OccupationState":
        occ = tuple(int(o) for o in occ)
        return cls(occ=occ, total=sum(occ))


def _enumerate_occupations(n_sites: int, total: int, cap: int) -> np.ndarray:
    """All occupation vectors with the given total and per-site cap.

    Ascending lexicographic order falls out of scanning occupation values of
    site 0 upward and recursing on the remainder.
    """
    out = []
    occ = np.zeros(n_sites, dtype=np.uint8)

    def fill(site: int, remaining: int):
        if site == n_sites:
            if remaining == 0:
                out.append(occ.copy())
            return
        # feasibility prune: the remaining sites must be able to hold the rest
        max_tail = cap * (n_sites - site - 1)
        lo = max(0, remaining - max_tail)
        hi = min(cap, remaining)
        for o in range(lo, hi + 1):
            occ[site] = o
            fill(site + 1, remaining - o)
        occ[site] = 0

    fill(0, total)
    if not out:
        return np.zeros((0, n_sites), dtype=np.uint8)
    return np.array(out, dtype=np.uint8)


def manifold_dimension(n_sites: int, total: int, cap: int) -> int:
    """Count of occupation vectors with the given total and per-site cap."""
    if total == 0:
        return 1
    if cap >= total:
        return comb(n_sites + total - 1, total)
    if cap == 1:
        return comb(n_sites, total)
    # inclusion-exclusion over sites forced above the cap
    count = 0
    for j in range(n_sites + 1):
        rem = total - j * (cap + 1)
        if rem < 0:
            break
        count += (-1) ** j * comb(n_sites, j) * comb(n_sites + rem - 1, n_sites - 1)
    return count


@dataclass
class ManifoldBasis:
    """Fixed-total-photon-number occupation basis on a lattice geometry."""

    geometry: LatticeGeometry
    n: int
    cap: int
    states: np.ndarray = field(repr=False)
    _index: dict = field(repr=False, default_factory=dict)

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    def rank(self, state) -> int:
        """Index of an occupation vector in this basis.

        Accepts an OccupationState, tuple, list or array.  Raises BasisError
        naming the offending state when it does not belong to the manifold.
        """
        if isinstance(state, OccupationState):
            occ = np.asarray(state.occ, dtype=np.uint8)
        else:
            occ = np.asarray(state, dtype=np.uint8)
        if occ.shape != (self.geometry.n_sites,):
            raise BasisError(
                f"occupation vector has {occ.shape} entries, lattice has {self.geometry.n_sites} sites"
            )
        key = occ.tobytes()
        idx = self._index.get(key)
        if idx is None:
            if int(occ.sum()) != self.n:
                raise BasisError(f"state {tuple(int(o) for o in occ)} has total {int(occ.sum())}, manifold holds {self.n}")
            if int(occ.max(initial=0)) > self.cap:
                raise BasisError(f"state {tuple(int(o) for o in occ)} violates per-site cap {self.cap}")
            raise BasisError(f"state {tuple(int(o) for o in occ)} not found in basis")
        return idx

    def unrank(self, index: int) -> OccupationState:
        if not 0 <= index < self.dim:
            raise BasisError(f"rank {index} outside 0..{self.dim - 1}")
        occ = tuple(int(o) for o in self.states[index])
        return OccupationState(occ=occ, total=self.n)

    def occupations(self) -> np.ndarray:
        """(dim, Ns) float array of site occupations, one row per state."""
        return self.states.astype(float)


def enumerate_manifold(geometry: LatticeGeometry, n: int, cap: int) -> ManifoldBasis:
    """Build the occupation basis for ``n`` photons with the given cap."""
    if n < 0:
        raise BasisError(f"photon number must be >= 0, got {n}")
    if cap < 1:
        raise BasisError(f"per-site cap must be >= 1, got {cap}")
    if n > cap * geometry.n_sites:
        raise BasisError(
            f"{n} photons cannot fit on {geometry.n_sites} sites with cap {cap}"
        )
    states = _enumerate_occupations(geometry.n_sites, n, cap)
    expected = manifold_dimension(geometry.n_sites, n, cap)
    if states.shape[0] != expected:
        raise BasisError(
            f"enumeration produced {states.shape[0]} states, counting predicts {expected}"
        )
    index = {states[i].tobytes(): i for i in range(states.shape[0])}
    return ManifoldBasis(geometry=geometry, n=n, cap=cap, states=states, _index=index)
