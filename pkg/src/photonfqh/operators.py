"""Sparse operators on fixed-number manifolds of a flux torus.

Hopping carries Peierls phases in a Landau-like gauge: x-links at row y carry
``exp(i 2 pi alpha y)``, interior y-links carry 1, and the y-wrap links from
row Ny-1 back to row 0 at column x carry the compensating twist
``exp(-i 2 pi alpha Ny x)``.  With that table every elementary plaquette
encloses the same flux: the counterclockwise Wilson loop equals
``exp(-i 2 pi alpha)`` on interior and wrap plaquettes alike (the single
corner plaquette also matches whenever the total flux count is an integer).

The driven, lossy model lives on the direct sum of photon-number manifolds
0..Nmax.  Its non-Hermitian effective Hamiltonian is block tridiagonal: the
diagonal block at n is hopping + interaction - n*(delta + i*kappa), and the
drive couples adjacent manifolds through kappa*beta times the site-summed
raising operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from .errors import OperatorError
from .lattice import LatticeGeometry, ManifoldBasis, enumerate_manifold

HARD_CORE = math.inf


@dataclass(frozen=True)
class ModelParams:
    """Couplings of the driven lossy flux lattice, all in units of J.

    U may be the HARD_CORE sentinel (math.inf), which means a per-site cap of
    one photon instead of an interaction energy.
    """

    J: float = 1.0
    U: float = HARD_CORE
    delta: float = 0.0
    kappa: float = 0.01
    beta: float = 0.01

    def __post_init__(self):
        if self.J <= 0:
            raise OperatorError(f"tunneling J must be positive, got {self.J}")
        if self.kappa <= 0:
            raise OperatorError(f"loss rate kappa must be positive, got {self.kappa}")
        if self.beta < 0:
            raise OperatorError(f"drive strength beta must be >= 0, got {self.beta}")
        if not math.isinf(self.U) and self.U < 0:
            raise OperatorError(f"interaction U must be >= 0 or HARD_CORE, got {self.U}")

    @property
    def hardcore(self) -> bool:
        return math.isinf(self.U)


def default_cap(params: ModelParams, nmax: int) -> int:
    """Per-site cap policy: 1 for hard core, otherwise min(nmax, 3)."""
    if params.hardcore:
        return 1
    return max(1, min(nmax, 3))


@dataclass
class LinkPhaseTable:
    """Directed nearest-neighbour links and their hopping phases.

    ``xphase[x, y]`` is the amplitude phase moving a photon from (x, y) to
    (x+1, y); ``yphase[x, y]`` moves it from (x, y) to (x, y+1).  Reversed
    hops carry the conjugate phase.  The flattened (src, dst, phase) arrays
    list every directed link for operator assembly.  Degenerate directions of
    width one carry no links (a 1 x L torus is an L-site ring).
    """

    geometry: LatticeGeometry
    alpha: float
    xphase: np.ndarray = field(repr=False)
    yphase: np.ndarray = field(repr=False)
    src: np.ndarray = field(repr=False)
    dst: np.ndarray = field(repr=False)
    phase: np.ndarray = field(repr=False)

    def plaquette_phase(self, x: int, y: int) -> complex:
        """Counterclockwise Wilson loop around the plaquette at (x, y)."""
        g = self.geometry
        if g.nx < 2 or g.ny < 2:
            raise OperatorError("plaquettes need both torus directions at least 2 wide")
        x %= g.nx
        y %= g.ny
        return (
            self.xphase[x, y]
            * self.yphase[(x + 1) % g.nx, y]
            * np.conj(self.xphase[x, (y + 1) % g.ny])
            * np.conj(self.yphase[x, y])
        )


def build_link_phases(geometry: LatticeGeometry, alpha: float | None = None) -> LinkPhaseTable:
    """Directed link table for the torus at flux density alpha.

    alpha defaults to the geometry's exact rational value; passing a float
    supports flux ramps through non-integer total flux (where the one corner
    plaquette absorbs the defect flux, as it must on a torus).
    """
    if alpha is None:
        alpha = float(geometry.alpha)
    nx, ny = geometry.nx, geometry.ny
    xphase = np.zeros((nx, ny), dtype=np.complex128)
    yphase = np.zeros((nx, ny), dtype=np.complex128)
    src, dst, phase = [], [], []

    def add(i, j, p):
        src.append(i)
        dst.append(j)
        phase.append(p)
        src.append(j)
        dst.append(i)
        phase.append(np.conj(p))

    for y in range(ny):
        for x in range(nx):
            i = geometry.site_index(x, y)
            xphase[x, y] = np.exp(2j * np.pi * alpha * y)
            if y == ny - 1:
                yphase[x, y] = np.exp(-2j * np.pi * alpha * ny * x)
            else:
                yphase[x, y] = 1.0 + 0.0j
            if nx > 1:
                add(i, geometry.site_index(x + 1, y), xphase[x, y])
            if ny > 1:
                add(i, geometry.site_index(x, y + 1), yphase[x, y])

    return LinkPhaseTable(
        geometry=geometry,
        alpha=float(alpha),
        xphase=xphase,
        yphase=yphase,
        src=np.array(src, dtype=np.int64),
        dst=np.array(dst, dtype=np.int64),
        phase=np.array(phase, dtype=np.complex128),
    )


@dataclass(frozen=True)
class DetectionMode:
    """Collection mode d = sum_i c_i a_i with unit norm coefficients."""

    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.complex128)
        object.__setattr__(self, "coefficients", c)
        norm = np.linalg.norm(c)
        if abs(norm - 1.0) > 1e-10:
            raise OperatorError(f"detection mode norm is {norm:.3e}, must be 1")


def _site_count(lattice_or_count) -> int:
    return getattr(lattice_or_count, "n_sites", lattice_or_count)


def uniform_mode(lattice_or_count) -> DetectionMode:
    """Common (zero-momentum) mode b = (1/sqrt(Ns)) sum_i a_i."""
    n_sites = _site_count(lattice_or_count)
    return DetectionMode(np.full(n_sites, 1.0 / np.sqrt(n_sites), dtype=np.complex128))


def site_mode(lattice_or_count, site: int) -> DetectionMode:
    c = np.zeros(_site_count(lattice_or_count), dtype=np.complex128)
    c[site] = 1.0
    return DetectionMode(c)


def _check_same_family(a: ManifoldBasis, b: ManifoldBasis):
    if a.geometry != b.geometry:
        raise OperatorError("bases live on different geometries")
    if a.cap != b.cap:
        raise OperatorError(f"bases have different caps ({a.cap} vs {b.cap})")


def build_hopping_block(basis: ManifoldBasis, table: LinkPhaseTable, J: float = 1.0) -> sp.csr_matrix:
    """Kinetic term -J sum_links phase * a_dst^dag a_src on one manifold."""
    if table.geometry != basis.geometry:
        raise OperatorError("link table geometry differs from basis geometry")
    dim = basis.dim
    if basis.n == 0 or dim == 0:
        return sp.csr_matrix((dim, dim), dtype=np.complex128)
    states = basis.states
    rows, cols, vals = [], [], []
    lookup = basis._index
    cap = basis.cap
    for s, d, p in zip(table.src, table.dst, table.phase):
        occ_s = states[:, s].astype(np.int64)
        occ_d = states[:, d].astype(np.int64)
        movable = np.nonzero((occ_s > 0) & (occ_d < cap))[0]
        if movable.size == 0:
            continue
        amp = -J * p
        for k in movable:
            new = states[k].copy()
            new[s] -= 1
            new[d] += 1
            j = lookup[new.tobytes()]
            rows.append(j)
            cols.append(k)
            vals.append(amp * np.sqrt(occ_s[k] * (occ_d[k] + 1.0)))
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=np.complex128)
    return mat


def build_interaction_block(basis: ManifoldBasis, U: float) -> sp.csr_matrix:
    """On-site term U * sum_i n_i (n_i - 1), diagonal in the occupation basis."""
    if math.isinf(U):
        if basis.cap > 1:
            raise OperatorError("HARD_CORE interaction requires a per-site cap of 1")
        return sp.csr_matrix((basis.dim, basis.dim), dtype=np.complex128)
    occ = basis.states.astype(np.float64)
    diag = U * np.sum(occ * (occ - 1.0), axis=1)
    return sp.diags(diag.astype(np.complex128), format="csr")


def build_number_block(basis: ManifoldBasis) -> sp.csr_matrix:
    """Total photon number, n * identity on a fixed-number manifold."""
    return sp.identity(basis.dim, dtype=np.complex128, format="csr") * basis.n


def build_site_number_diag(basis: ManifoldBasis, weights: np.ndarray) -> sp.csr_matrix:
    """Diagonal sum_i weights_i * n_i on one manifold."""
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (basis.geometry.n_sites,):
        raise OperatorError("weight vector length must equal the site count")
    diag = basis.states.astype(np.float64) @ w
    return sp.diags(diag.astype(np.complex128), format="csr")


def build_raising(bn: ManifoldBasis, bn1: ManifoldBasis, mode: DetectionMode | np.ndarray) -> sp.csr_matrix:
    """Mode raising operator d^dag = sum_i conj(c_i) a_i^dag, manifold n -> n+1.

    Accepts a DetectionMode (normalized) or a raw coefficient array; the raw
    form exists for the site-summed drive operator sum_i a_i^dag, whose
    coefficient vector of ones is deliberately unnormalized.
    """
    _check_same_family(bn, bn1)
    if bn1.n != bn.n + 1:
        raise OperatorError(f"raising needs target manifold n+1, got {bn.n} -> {bn1.n}")
    c = mode.coefficients if isinstance(mode, DetectionMode) else np.asarray(mode, dtype=np.complex128)
    if c.shape != (bn.geometry.n_sites,):
        raise OperatorError("mode coefficient length must equal the site count")
    cbar = np.conj(c)
    rows, cols, vals = [], [], []
    lookup = bn1._index
    cap = bn.cap
    states = bn.states
    for i in range(bn.geometry.n_sites):
        if cbar[i] == 0:
            continue
        occ_i = states[:, i].astype(np.int64)
        addable = np.nonzero(occ_i < cap)[0]
        for k in addable:
            new = states[k].copy()
            new[i] += 1
            j = lookup[new.tobytes()]
            rows.append(j)
            cols.append(k)
            vals.append(cbar[i] * np.sqrt(occ_i[k] + 1.0))
    return sp.csr_matrix((vals, (rows, cols)), shape=(bn1.dim, bn.dim), dtype=np.complex128)


def build_lowering(bn: ManifoldBasis, bn_minus: ManifoldBasis, mode: DetectionMode | np.ndarray) -> sp.csr_matrix:
    """Mode lowering operator d = sum_i c_i a_i, manifold n -> n-1.

    Exactly the adjoint of build_raising with the same mode.
    """
    return build_raising(bn_minus, bn, mode).conj().T.tocsr()


def build_site_lowering(bn: ManifoldBasis, bn_minus: ManifoldBasis, site: int) -> sp.csr_matrix:
    """Single-site annihilation operator a_site, manifold n -> n-1."""
    c = np.zeros(bn.geometry.n_sites, dtype=np.complex128)
    c[site] = 1.0
    return build_raising(bn_minus, bn, c).conj().T.tocsr()


@dataclass
class HeffBlocks:
    """Block-tridiagonal pieces of the effective Hamiltonian up to Nmax.

    hop[n] + interaction[n] are the undriven Hermitian blocks; raising[n] is
    the site-summed a^dag block from manifold n to n+1 (drive amplitude
    kappa*beta multiplies it).  The loss enters only through the complex
    detuning on the diagonal.
    """

    geometry: LatticeGeometry
    params: ModelParams
    nmax: int
    cap: int
    alpha: float
    bases: list
    hop: list
    interaction: list
    raising: list
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def dims(self) -> list[int]:
        return [b.dim for b in self.bases]

    @property
    def offsets(self) -> list[int]:
        out = [0]
        for d in self.dims:
            out.append(out[-1] + d)
        return out

    def with_params(self, params: ModelParams) -> "HeffBlocks":
        """Same geometry/basis family under new couplings (same U class).

        Rebuilding the flux- and basis-independent pieces is avoided; only the
        interaction diagonal is refreshed when U changes.
        """
        if params.hardcore != self.params.hardcore:
            raise OperatorError("cannot switch between hard-core and finite U without rebuilding bases")
        interaction = self.interaction
        if not params.hardcore and params.U != self.params.U:
            interaction = [build_interaction_block(b, params.U) for b in self.bases]
        hop = self.hop
        if params.J != self.params.J:
            hop = [h * (params.J / self.params.J) for h in self.hop]
        return replace(self, params=params, hop=hop, interaction=interaction)

    def undriven_block(self, n: int) -> sp.csr_matrix:
        """Hermitian hopping + interaction block of manifold n."""
        return (self.hop[n] + self.interaction[n]).tocsr()

    def manifold_matrix(self, n: int) -> sp.csc_matrix:
        """H_n - n * (delta + i*kappa) * I, the chain-solve left-hand side."""
        z = self.params.delta + 1j * self.params.kappa
        return (self.undriven_block(n) - n * z * sp.identity(self.bases[n].dim, dtype=np.complex128)).tocsc()

    def drive_raising(self, n: int) -> sp.csr_matrix:
        """kappa*beta * sum_i a_i^dag from manifold n to n+1."""
        return (self.params.kappa * self.params.beta) * self.raising[n]

    def full_matrix(self) -> sp.csc_matrix:
        """Assemble the block-tridiagonal effective Hamiltonian."""
        m = self.nmax + 1
        grid = [[None] * m for _ in range(m)]
        for n in range(m):
            grid[n][n] = self.manifold_matrix(n)
        for n in range(self.nmax):
            up = self.drive_raising(n)
            grid[n + 1][n] = up
            grid[n][n + 1] = up.conj().T
        return sp.bmat(grid, format="csc", dtype=np.complex128)

    def split(self, vec: np.ndarray) -> list[np.ndarray]:
        """Cut a full-space vector into per-manifold components."""
        off = self.offsets
        return [np.asarray(vec[off[n]:off[n + 1]]) for n in range(self.nmax + 1)]


def assemble_heff_blocks(
    geometry: LatticeGeometry,
    params: ModelParams,
    nmax: int,
    cap: int | None = None,
    alpha: float | None = None,
) -> HeffBlocks:
    """Bases and operator blocks for manifolds 0..Nmax of the driven model."""
    if nmax < 1:
        raise OperatorError(f"Nmax must be >= 1, got {nmax}")
    if cap is None:
        cap = default_cap(params, nmax)
    if params.hardcore and cap != 1:
        raise OperatorError("hard-core runs require cap = 1")
    table = build_link_phases(geometry, alpha=alpha)
    bases = [enumerate_manifold(geometry, n, cap) for n in range(nmax + 1)]
    hop = [build_hopping_block(b, table, params.J) for b in bases]
    interaction = [build_interaction_block(b, params.U) for b in bases]
    ones = np.ones(geometry.n_sites, dtype=np.complex128)
    raising = [build_raising(bases[n], bases[n + 1], ones) for n in range(nmax)]
    return HeffBlocks(
        geometry=geometry,
        params=params,
        nmax=nmax,
        cap=cap,
        alpha=table.alpha,
        bases=bases,
        hop=hop,
        interaction=interaction,
        raising=raising,
    )
