"""Exact Lindblad steady state on tiny lattices and jump-free comparison.

The master equation is

    d rho / dt = -i [H, rho] + kappa * sum_i (2 a_i rho a_i^dag
                                              - a_i^dag a_i rho
                                              - rho a_i^dag a_i),

with H the Hermitian rotating-frame Hamiltonian (hopping + interaction +
drive - detuning * N).  Equivalently the jump operators are sqrt(2*kappa)*a_i,
whose no-jump drift reproduces the non-Hermitian effective Hamiltonian with
complex detuning delta + i*kappa used everywhere else in this package.

The Hilbert space is the same total-photon-number truncation (manifolds
0..Nmax with a per-site cap) used by the metastable-state solver, so the two
routes are compared apples to apples and the residual difference isolates the
quantum-jump contribution, which enters at relative O(beta^2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DegenerateSteadyStateError, DimensionGuardError, SolverError
from .operators import (
    DetectionMode,
    HeffBlocks,
    ModelParams,
    assemble_heff_blocks,
    build_site_lowering,
    uniform_mode,
)
from .lattice import LatticeGeometry
from .steady_state import MetastableState

DIM_GUARD = 256


@dataclass
class LindbladSystem:
    """Truncated Hilbert space, Hamiltonian, jumps and Liouvillian."""

    blocks: HeffBlocks
    hamiltonian: sp.csr_matrix
    site_lowerings: list
    liouvillian: sp.csc_matrix

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]


def _full_space(blocks: HeffBlocks, fill) -> sp.csr_matrix:
    """Assemble a full-space operator from a per-manifold block filler."""
    m = blocks.nmax + 1
    grid = [[None] * m for _ in range(m)]
    fill(grid)
    for n in range(m):
        if grid[n][n] is None:
            grid[n][n] = sp.csr_matrix((blocks.dims[n], blocks.dims[n]), dtype=np.complex128)
    return sp.bmat(grid, format="csr", dtype=np.complex128)


def full_site_lowering(blocks: HeffBlocks, site: int) -> sp.csr_matrix:
    """Annihilation operator a_site on the direct sum of manifolds."""

    def fill(grid):
        for n in range(1, blocks.nmax + 1):
            grid[n - 1][n] = build_site_lowering(blocks.bases[n], blocks.bases[n - 1], site)

    return _full_space(blocks, fill)


def full_mode_lowering(blocks: HeffBlocks, mode: DetectionMode) -> sp.csr_matrix:
    """Mode operator d = sum_i c_i a_i on the direct sum of manifolds."""
    out = None
    for i, c in enumerate(mode.coefficients):
        if c == 0:
            continue
        term = c * full_site_lowering(blocks, i)
        out = term if out is None else out + term
    return out.tocsr()


def full_hermitian_hamiltonian(blocks: HeffBlocks) -> sp.csr_matrix:
    """Rotating-frame H: hopping + interaction + drive - delta * N."""
    params = blocks.params
    m = blocks.nmax + 1

    def fill(grid):
        for n in range(m):
            block = blocks.undriven_block(n) - params.delta * n * sp.identity(
                blocks.dims[n], dtype=np.complex128
            )
            grid[n][n] = block
        for n in range(blocks.nmax):
            up = blocks.drive_raising(n)
            grid[n + 1][n] = up
            grid[n][n + 1] = up.conj().T

    return _full_space(blocks, fill)


def build_liouvillian(
    geometry: LatticeGeometry,
    params: ModelParams,
    nmax: int,
    cap: int | None = None,
    alpha: float | None = None,
    blocks: HeffBlocks | None = None,
) -> LindbladSystem:
    """Superoperator of the master equation on the truncated space.

    Column-stacking convention: vec(rho) = rho.flatten(order='F') and
    vec(A rho B) = (B^T kron A) vec(rho).
    """
    if blocks is None:
        blocks = assemble_heff_blocks(geometry, params, nmax, cap=cap, alpha=alpha)
    dim = sum(blocks.dims)
    if dim > DIM_GUARD:
        raise DimensionGuardError(
            f"Hilbert dimension {dim} exceeds the exact-oracle guard {DIM_GUARD}"
        )
    H = full_hermitian_hamiltonian(blocks)
    eye = sp.identity(dim, dtype=np.complex128, format="csr")
    lio = -1j * (sp.kron(eye, H) - sp.kron(H.T, eye))
    kappa = blocks.params.kappa
    lowerings = []
    for i in range(geometry.n_sites):
        a = full_site_lowering(blocks, i)
        lowerings.append(a)
        num = (a.conj().T @ a).tocsr()
        lio = lio + kappa * (
            2.0 * sp.kron(a.conj(), a) - sp.kron(eye, num) - sp.kron(num.T, eye)
        )
    return LindbladSystem(
        blocks=blocks,
        hamiltonian=H.tocsr(),
        site_lowerings=lowerings,
        liouvillian=lio.tocsc(),
    )


@dataclass
class DensityOperator:
    """Steady-state density matrix with solution diagnostics."""

    matrix: np.ndarray
    residual: float
    hermiticity_defect: float
    min_population: float

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _steady_solve(lio: sp.csc_matrix, dim: int, constraint_row: int) -> np.ndarray:
    """Solve L x = 0 with tr(x) = 1 by replacing one row with the trace row."""
    n2 = dim * dim
    trace_row = sp.csr_matrix(
        (np.ones(dim), (np.zeros(dim, dtype=int), np.arange(dim) * (dim + 1))),
        shape=(1, n2),
        dtype=np.complex128,
    )
    mod = lio.tolil(copy=True)
    mod[constraint_row, :] = trace_row.toarray().ravel()
    rhs = np.zeros(n2, dtype=np.complex128)
    rhs[constraint_row] = 1.0
    return spla.spsolve(mod.tocsc(), rhs)


def exact_steady_state(system: LindbladSystem, rtol: float = 1e-10) -> DensityOperator:
    """Unique trace-one steady state of the Liouvillian.

    Solves the trace-constrained linear system, Hermitizes, and verifies the
    Liouvillian residual, positivity, and (for small systems via a dense
    spectrum, otherwise via an independent constraint row) uniqueness of the
    null space.
    """
    dim = system.dim
    lio = system.liouvillian
    scale = max(spla.norm(lio, np.inf), 1.0)

    x = _steady_solve(lio, dim, constraint_row=0)
    rho = x.reshape((dim, dim), order="F")
    herm_defect = float(np.max(np.abs(rho - rho.conj().T)))
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real

    residual = float(np.linalg.norm(lio @ rho.flatten(order="F")) / scale)
    if not np.isfinite(residual) or residual > rtol:
        raise SolverError(
            f"steady-state residual {residual:.3e} exceeds {rtol:.1e}", residual=residual
        )

    if dim <= 32:
        evals = np.linalg.eigvals(lio.toarray())
        null_count = int(np.sum(np.abs(evals) < 1e-10 * scale))
        if null_count != 1:
            raise DegenerateSteadyStateError(
                f"Liouvillian null space has dimension {null_count}; steady state not unique"
            )
    else:
        x2 = _steady_solve(lio, dim, constraint_row=dim * dim // 2 + 1)
        rho2 = x2.reshape((dim, dim), order="F")
        rho2 = 0.5 * (rho2 + rho2.conj().T)
        rho2 = rho2 / np.trace(rho2).real
        if np.max(np.abs(rho2 - rho)) > 1e-8:
            raise DegenerateSteadyStateError(
                "independent trace constraints disagree; steady state not unique"
            )

    pops = np.linalg.eigvalsh(rho)
    min_pop = float(pops.min())
    if min_pop < -1e-10:
        raise SolverError(f"steady state has negative population {min_pop:.3e}")
    return DensityOperator(
        matrix=rho,
        residual=residual,
        hermiticity_defect=herm_defect,
        min_population=min_pop,
    )


@dataclass
class GnComparison:
    """Exact vs jump-free photon counting moment of one order."""

    order: int
    exact: float
    metastable: float
    rel_err: float


def metastable_gn_full(state: MetastableState, blocks: HeffBlocks, mode: DetectionMode, order: int) -> float:
    """<d^dag^n d^n> over the normalized truncated metastable state.

    Uses every manifold of the truncation (not just the leading one), so the
    difference from the exact Lindblad value is purely the jump contribution.
    """
    d = full_mode_lowering(blocks, mode)
    psi = np.concatenate(state.components)
    vec = psi.copy()
    for _ in range(order):
        vec = d @ vec
    return float(np.vdot(vec, vec).real / np.vdot(psi, psi).real)


def compare_gn(
    system: LindbladSystem,
    rho: DensityOperator,
    state: MetastableState,
    mode: DetectionMode | None = None,
    orders: tuple = (1, 2),
) -> list[GnComparison]:
    """Exact-Lindblad vs metastable-state counting moments G^(n)."""
    blocks = system.blocks
    if mode is None:
        mode = uniform_mode(blocks.geometry.n_sites)
    if state.nmax != blocks.nmax:
        raise SolverError("metastable state and Lindblad system truncations differ")
    d = full_mode_lowering(blocks, mode).toarray()
    out = []
    for order in orders:
        m = np.linalg.matrix_power(d, order)
        exact = float(np.trace(rho.matrix @ (m.conj().T @ m)).real)
        meta = metastable_gn_full(state, blocks, mode, order)
        denom = max(abs(exact), 1e-300)
        out.append(
            GnComparison(order=order, exact=exact, metastable=meta, rel_err=abs(exact - meta) / denom)
        )
    return out
