"""Photon correlation functions and overlap diagnostics.

All detection-mode correlators follow the weak-drive counting rule: the
n-photon coincidence numerator <d^dag^n d^n> is carried entirely by the
n-photon component of the metastable state at leading order, and the
denominator <d^dag d>^n by the one-photon component.  Corrections (state
normalization, quantum jumps, higher manifolds) enter at relative
O(beta^2); an optional annotation bounds them from the computed components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OperatorError
from .lattice import ManifoldBasis, enumerate_manifold
from .operators import (
    DetectionMode,
    HeffBlocks,
    build_hopping_block,
    build_interaction_block,
    build_link_phases,
    build_lowering,
    uniform_mode,
)
from .solvers import lowest_hermitian_eigs
from .steady_state import MetastableState


@dataclass
class CorrelationReport:
    """Normalized n-photon correlation of one detection mode."""

    order: int
    value: float
    numerator: float
    denominator: float
    error_bound: float | None = None


def _mode_lowering_cached(blocks: HeffBlocks, m: int, mode: DetectionMode):
    key = ("mode_lowering", m, mode.coefficients.tobytes())
    if key not in blocks.cache:
        blocks.cache[key] = build_lowering(blocks.bases[m], blocks.bases[m - 1], mode)
    return blocks.cache[key]


def _mode_ladder_scalars(state: MetastableState, blocks: HeffBlocks, mode: DetectionMode, order: int):
    """Scalars s_k = <0| d^k |psi_k> for k = 1..order.

    Repeated application of the mode lowering operator drops psi_k down to
    the vacuum; the survivor is the k-photon detection amplitude.
    """
    scalars = {}
    for k in range(1, order + 1):
        vec = state.components[k]
        for m in range(k, 0, -1):
            vec = _mode_lowering_cached(blocks, m, mode) @ vec
        scalars[k] = complex(vec[0])
    return scalars


def gn_detection_mode(
    state: MetastableState,
    blocks: HeffBlocks,
    mode: DetectionMode,
    order: int,
    annotate_error: bool = False,
) -> CorrelationReport:
    """Equal-time g^(n) of a detection mode from the metastable state."""
    if not isinstance(mode, DetectionMode):
        mode = DetectionMode(np.asarray(mode, dtype=np.complex128))
    if order < 1:
        raise OperatorError(f"correlation order must be >= 1, got {order}")
    if order > state.nmax:
        raise OperatorError(
            f"g^({order}) needs manifold {order}, state holds Nmax = {state.nmax}"
        )
    scalars = _mode_ladder_scalars(state, blocks, mode, order)
    numerator = abs(scalars[order]) ** 2
    denominator = abs(scalars[1]) ** 2
    if denominator == 0.0:
        raise OperatorError("mode carries no one-photon amplitude; g^(n) undefined")
    value = numerator / denominator**order
    bound = None
    if annotate_error:
        # validity annotation: relative O(beta^2) corrections from state
        # normalization (||psi_1||^2 dominates) and, when available, the
        # next manifold's weight relative to the measured one.
        bound = state.norm(1) ** 2
        if order + 1 <= state.nmax:
            top, here = state.norm(order + 1), state.norm(order)
            if here > 0:
                bound += (top / here) ** 2
        bound *= value
    return CorrelationReport(
        order=order,
        value=float(value),
        numerator=float(numerator),
        denominator=float(denominator),
        error_bound=bound,
    )


def g2_cm(state: MetastableState, blocks: HeffBlocks, annotate_error: bool = False) -> CorrelationReport:
    """Common-mode (zero-momentum) two-photon correlation."""
    return gn_detection_mode(state, blocks, uniform_mode(blocks.geometry.n_sites), 2, annotate_error)


def g3_cm(state: MetastableState, blocks: HeffBlocks, annotate_error: bool = False) -> CorrelationReport:
    """Common-mode three-photon correlation."""
    return gn_detection_mode(state, blocks, uniform_mode(blocks.geometry.n_sites), 3, annotate_error)


def onsite_g2(state: MetastableState, blocks: HeffBlocks, site: int) -> CorrelationReport:
    """Same-site two-photon correlation g^(2)(i, i)."""
    from .operators import site_mode

    return gn_detection_mode(state, blocks, site_mode(blocks.geometry.n_sites, site), 2)


def two_point_projected(vec: np.ndarray, basis: ManifoldBasis) -> np.ndarray:
    """Density-density correlation g(i, j) of a normalized manifold vector.

    g(i, j) = <a_i^dag a_j^dag a_j a_i> = <n_i n_j> - delta_ij <n_i>, which is
    diagonal in the occupation basis.  Rows sum to n(n-1) overall.
    """
    v = np.asarray(vec, dtype=np.complex128)
    if v.shape != (basis.dim,):
        raise OperatorError(f"vector length {v.shape} does not match basis dim {basis.dim}")
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise OperatorError("cannot correlate the zero vector")
    w = (np.abs(v) ** 2) / nrm**2
    occ = basis.occupations()
    ns = basis.geometry.n_sites
    g = np.einsum("s,si,sj->ij", w, occ, occ)
    g[np.diag_indices(ns)] = w @ (occ * (occ - 1.0))
    return g


@dataclass
class OverlapResult:
    """Overlap of a normalized vector with a target pair/manifold.

    per_state[k] = |<target_k|psi>|^2; span is the projector expectation
    sum_k |<target_k|psi>|^2 after orthonormalizing the targets, i.e. the
    weight of psi inside the degenerate target manifold.
    """

    per_state: list
    span: float


def manifold_overlap(vec: np.ndarray, targets: list[np.ndarray]) -> OverlapResult:
    """Overlap of a state with each target and with their span."""
    v = np.asarray(vec, dtype=np.complex128)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise OperatorError("cannot project the zero vector")
    v = v / nrm
    mat = np.column_stack([np.asarray(t, dtype=np.complex128) for t in targets])
    mat = mat / np.linalg.norm(mat, axis=0)
    per_state = [float(abs(np.vdot(mat[:, k], v)) ** 2) for k in range(mat.shape[1])]
    q, _ = np.linalg.qr(mat)
    span = float(np.linalg.norm(q.conj().T @ v) ** 2)
    return OverlapResult(per_state=per_state, span=span)


def span_overlap(states_a: list[np.ndarray], states_b: list[np.ndarray]) -> float:
    """Mean squared principal-angle cosine between two subspaces.

    1.0 means identical spans; built from the singular values of the cross
    Gram matrix of orthonormalized bases.
    """
    qa, _ = np.linalg.qr(np.column_stack(states_a))
    qb, _ = np.linalg.qr(np.column_stack(states_b))
    sv = np.linalg.svd(qa.conj().T @ qb, compute_uv=False)
    return float(np.sum(sv**2) / min(qa.shape[1], qb.shape[1]))


def nonlinearity_estimate(blocks: HeffBlocks) -> tuple[float, float]:
    """Effective two-photon nonlinearity and the bunching ceiling it implies.

    delta_u = E2_min/2 - E1_min measures how far the lowest two-photon state
    is from twice the lowest one-photon state; treating the common mode as a
    single Kerr cavity predicts a maximal two-photon bunching of
    1 + (delta_u/kappa)^2 when driving at the two-photon resonance.
    """
    def undriven(n):
        if n <= blocks.nmax:
            return blocks.undriven_block(n)
        # the two-photon manifold is needed even when the sweep itself stops
        # at one photon, so build it on demand
        basis = enumerate_manifold(blocks.geometry, n, blocks.cap)
        table = build_link_phases(blocks.geometry, alpha=blocks.alpha)
        block = build_hopping_block(basis, table, blocks.params.J)
        if not blocks.params.hardcore and blocks.params.U:
            block = block + build_interaction_block(basis, blocks.params.U)
        return block

    e1, _, _ = lowest_hermitian_eigs(undriven(1), k=1)
    e2, _, _ = lowest_hermitian_eigs(undriven(2), k=1)
    delta_u = e2[0] / 2.0 - e1[0]
    return float(delta_u), float(1.0 + (delta_u / blocks.params.kappa) ** 2)
