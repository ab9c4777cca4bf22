"""Quasi-static melt protocol from a pinned Mott pair to the flux ground space."""

import numpy as np
import pytest

from photonfqh import ConfigError, ProtocolSchedule, run_protocol
from photonfqh.protocol import STAGES, build_protocol_hamiltonian
from photonfqh.lattice import build_geometry, enumerate_manifold
from photonfqh.solvers import lowest_hermitian_eigs


def test_schedule_validation():
    with pytest.raises(ConfigError):
        ProtocolSchedule(nx=4, ny=4, super_nx=3, super_ny=1)  # does not divide
    with pytest.raises(ConfigError):
        ProtocolSchedule(points_per_stage=1)
    with pytest.raises(ConfigError):
        ProtocolSchedule(v_sl_max=0.0)


def test_schedule_controls_are_piecewise_monotone():
    s = ProtocolSchedule(points_per_stage=8)
    v0, p0, a0 = s.controls("pin", 0.0)
    assert (v0, p0, a0) == (0.0, 0.0, 0.0)
    v1, p1, a1 = s.controls("pin", 1.0)
    assert v1 == s.v_sl_max and p1 == 0.0 and a1 == 0.0
    v2, p2, a2 = s.controls("flux_on", 1.0)
    assert a2 == pytest.approx(0.25)
    v3, p3, a3 = s.controls("melt", 1.0)
    assert v3 == 0.0 and a3 == pytest.approx(0.25)
    v4, p4, a4 = s.controls("impurity_off", 1.0)
    assert p4 == 0.0


def test_pinning_localizes_ground_state():
    # deep superlattice: ground state is photons on the pinned sites
    sched = ProtocolSchedule(points_per_stage=8)
    g = sched.geometry
    basis = enumerate_manifold(g, sched.n_ph, cap=1)
    H = build_protocol_hamiltonian(
        g, basis, v_sl=sched.v_sl_max, v_pert=0.0, alpha=0.0,
        pinned_sites=sched.pinned_sites(), impurity_site=None,
    )
    vals, vecs, _ = lowest_hermitian_eigs(H, k=1)
    occ = np.zeros(g.n_sites, dtype=np.uint8)
    for s in sched.pinned_sites():
        occ[s] = 1
    k = basis.rank(occ)
    assert abs(vecs[k, 0]) ** 2 > 0.99


def test_protocol_reaches_flux_ground_space():
    res = run_protocol(ProtocolSchedule(points_per_stage=12))
    assert res.mott_overlap > 0.99
    assert res.final_overlap_pair > 0.9
    assert [r.stage for r in res.records[::12]] == list(STAGES)
    assert all(r.gap >= 0 for r in res.records)


def test_impurity_keeps_melt_gap_open():
    with_imp = run_protocol(ProtocolSchedule(points_per_stage=12))
    without = run_protocol(ProtocolSchedule(points_per_stage=12, include_impurity=False))
    assert without.min_gap_melt_window() < 0.02
    assert with_imp.min_gap_melt_window() > 5 * max(without.min_gap_melt_window(), 1e-6)
    # removing the impurity at the end closes the splitting again
    assert with_imp.records[-1].gap < 0.05


def test_continuity_tracking_present():
    res = run_protocol(ProtocolSchedule(points_per_stage=8))
    cont = [r.continuity for r in res.records[1:]]
    assert all(0.0 <= c <= 1.0 + 1e-9 for c in cont)
    # quasi-static path is smooth at these resolutions
    assert np.median(cont) > 0.99
