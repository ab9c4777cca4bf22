"""Weak-drive metastable state of the lossy driven flux lattice.

Under weak coherent drive the long-lived density matrix is dominated by a
pure state whose photon-number components scale like beta^n.  With the vacuum
amplitude normalized to one, the components obey a triangular chain of linear
systems,

    (H_n - n*(delta + i*kappa)) psi_n = -kappa*beta * R  psi_{n-1},

where H_n is the undriven block of manifold n and R the site-summed raising
operator.  Each left-hand side has anti-Hermitian part -i*n*kappa*I, so its
smallest singular value is at least n*kappa and the solves are well posed at
any detuning.  Dropped terms (state decay rate and back-action from the
manifold above) enter two orders higher in beta.

The independent validation route diagonalizes the full block-tridiagonal
non-Hermitian matrix and picks the eigenpair with the smallest imaginary
eigenvalue magnitude among candidates anchored on the vacuum.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AmbiguousMetastableError, SolverError
from .lattice import enumerate_manifold
from .operators import HeffBlocks, build_raising
from .solvers import eigs_near_zero, solve_manifold_linear


@dataclass
class MetastableState:
    """Per-manifold components of the weak-drive metastable state.

    components[n] is the amplitude vector on the n-photon manifold, with
    components[0] = [1] (vacuum normalization).  eigenvalue is the complex
    state eigenvalue estimate: the chain route reports the second-order value
    kappa*beta*sum(psi_1); the eigensolve route reports the exact one.
    """

    components: list
    eigenvalue: complex
    method: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def nmax(self) -> int:
        return len(self.components) - 1

    def norm(self, n: int) -> float:
        return float(np.linalg.norm(self.components[n]))

    def total_norm_sq(self) -> float:
        return float(sum(np.vdot(c, c).real for c in self.components))


def solve_perturbative_chain(blocks: HeffBlocks) -> MetastableState:
    """Order-by-order solve of the weak-drive chain up to Nmax.

    Raises SolverError if any solve misses its residual contract or if a
    component breaks the rigorous growth bound
    ||psi_n|| <= beta * ||R psi_{n-1}|| / n (smallest-singular-value bound).
    """
    params = blocks.params
    kb = params.kappa * params.beta
    components = [np.ones(1, dtype=np.complex128)]
    residuals = []
    bounds = []
    for n in range(1, blocks.nmax + 1):
        driven = blocks.raising[n - 1] @ components[n - 1]
        rhs = -kb * driven
        A = blocks.manifold_matrix(n)
        psi = solve_manifold_linear(A, rhs)
        bound = params.beta * np.linalg.norm(driven) / n
        bounds.append(float(bound))
        norm = np.linalg.norm(psi)
        if norm > bound * (1.0 + 1e-6) + 1e-300:
            raise SolverError(
                f"manifold {n} component norm {norm:.3e} breaks the growth bound {bound:.3e}"
            )
        rnorm = np.linalg.norm(A @ psi - rhs)
        residuals.append(float(rnorm))
        components.append(psi)
    lam = kb * complex(np.sum(components[1])) if blocks.nmax >= 1 else 0.0j
    return MetastableState(
        components=components,
        eigenvalue=lam,
        method="chain",
        diagnostics={"solve_residuals": residuals, "growth_bounds": bounds},
    )


def solve_eigen_metastable(
    blocks: HeffBlocks,
    k: int = 8,
    vacuum_overlap_floor: float = 0.1,
    rtol: float = 1e-8,
) -> MetastableState:
    """Metastable state from a shift-invert eigensolve of the full matrix.

    Candidates must carry at least vacuum_overlap_floor of their weight on
    the vacuum; among those the smallest |Im eigenvalue| wins.  Two
    candidates with indistinguishable |Im| and comparable vacuum weight make
    the selection ill-posed and raise AmbiguousMetastableError listing both.
    """
    H = blocks.full_matrix()
    dim = H.shape[0]
    v0 = np.zeros(dim, dtype=np.complex128)
    v0[0] = 1.0
    vals, vecs, residuals = eigs_near_zero(H, k=k, v0=v0, rtol=rtol)

    vac = np.abs(vecs[0, :]) / np.linalg.norm(vecs, axis=0)
    keep = np.nonzero(vac >= vacuum_overlap_floor)[0]
    if keep.size == 0:
        raise SolverError(
            f"no eigenpair near zero carries vacuum weight >= {vacuum_overlap_floor}"
        )
    order = keep[np.argsort(np.abs(vals[keep].imag))]
    best = order[0]
    if order.size > 1:
        second = order[1]
        if abs(abs(vals[second].imag) - abs(vals[best].imag)) < 1e-10 * blocks.params.kappa and vac[second] > 0.5 * vac[best]:
            raise AmbiguousMetastableError(
                "two comparable metastable candidates",
                candidates=[(vals[best], vac[best]), (vals[second], vac[second])],
            )
    vec = vecs[:, best]
    if vec[0] == 0:
        raise SolverError("selected eigenvector has zero vacuum amplitude")
    vec = vec / vec[0]
    return MetastableState(
        components=blocks.split(vec),
        eigenvalue=complex(vals[best]),
        method="eigen",
        diagnostics={
            "eigen_residuals": residuals.tolist(),
            "candidate_eigenvalues": vals.tolist(),
            "vacuum_weights": vac.tolist(),
        },
    )


def residual_report(state: MetastableState, blocks: HeffBlocks, eigenvalue: complex | None = None) -> dict:
    """Per-manifold residual of the full eigen equation for a state.

    Entry n is the norm of the manifold-n block of (H_eff - lambda) |psi>,
    using the state's own eigenvalue estimate unless one is supplied.  The
    'truncation' entry is the norm of the drive leakage into manifold Nmax+1,
    which no truncated representation can cancel.
    """
    lam = state.eigenvalue if eigenvalue is None else eigenvalue
    params = blocks.params
    kb = params.kappa * params.beta
    comps = state.components
    report = {}
    for n in range(blocks.nmax + 1):
        r = blocks.manifold_matrix(n) @ comps[n] - lam * comps[n]
        if n >= 1:
            r = r + kb * (blocks.raising[n - 1] @ comps[n - 1])
        if n < blocks.nmax:
            r = r + kb * (blocks.raising[n].conj().T @ comps[n + 1])
        report[n] = float(np.linalg.norm(r))
    if blocks.nmax + 1 > blocks.cap * blocks.geometry.n_sites:
        report["truncation"] = 0.0
    else:
        top = enumerate_manifold(blocks.geometry, blocks.nmax + 1, blocks.cap)
        ones = np.ones(blocks.geometry.n_sites, dtype=np.complex128)
        raise_top = build_raising(blocks.bases[blocks.nmax], top, ones)
        report["truncation"] = float(kb * np.linalg.norm(raise_top @ comps[blocks.nmax]))
    return report
