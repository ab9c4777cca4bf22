"""Exact Lindblad steady-state oracle on tiny lattices."""

import numpy as np
import pytest

from photonfqh import (
    HARD_CORE,
    DimensionGuardError,
    ModelParams,
    build_geometry,
    build_liouvillian,
    compare_gn,
    exact_steady_state,
    solve_perturbative_chain,
    uniform_mode,
)
from photonfqh.lindblad import metastable_gn_full


def small_system(nx=2, ny=2, beta=0.01, u=HARD_CORE, delta=-2.0, nmax=2, nphi=0, kappa=0.02):
    g = build_geometry(nx, ny, nphi)
    p = ModelParams(J=1.0, U=u, delta=delta, kappa=kappa, beta=beta)
    return build_liouvillian(g, p, nmax)


def test_steady_state_properties():
    system = small_system()
    rho = exact_steady_state(system)
    m = rho.matrix
    assert abs(np.trace(m) - 1.0) < 1e-12
    assert np.allclose(m, m.conj().T, atol=1e-12)
    assert rho.min_population > -1e-10
    assert rho.residual < 1e-10


def test_vacuum_dominates_at_weak_drive():
    rho = exact_steady_state(small_system())
    assert rho.matrix[0, 0].real > 0.999


def test_zero_interaction_agrees_with_coherent_chain():
    # U = 0 with a deep truncation: metastable pure state and exact mixed
    # steady state describe the same coherent state
    system = small_system(nx=1, ny=2, u=0.0, nmax=3, delta=-1.5, beta=0.02)
    rho = exact_steady_state(system)
    state = solve_perturbative_chain(system.blocks)
    comps = compare_gn(system, rho, state, orders=(1, 2))
    for comp in comps:
        assert comp.rel_err < 1e-8, f"g{comp.order} rel err {comp.rel_err:.2e}"


def test_error_scales_as_beta_squared():
    errs = {}
    for beta in (0.01, 0.005):
        system = small_system(beta=beta)
        rho = exact_steady_state(system)
        state = solve_perturbative_chain(system.blocks)
        comps = compare_gn(system, rho, state, orders=(2,))
        errs[beta] = comps[0].rel_err
        assert comps[0].rel_err < 10 * beta**2
    ratio = errs[0.01] / errs[0.005]
    assert 2.5 <= ratio <= 6.0


def test_flux_lattice_oracle():
    system = small_system(nx=2, ny=2, nphi=1, delta=-2.5)
    rho = exact_steady_state(system)
    state = solve_perturbative_chain(system.blocks)
    comps = compare_gn(system, rho, state, orders=(1, 2))
    for comp in comps:
        assert comp.rel_err < 1e-3


def test_dimension_guard():
    g = build_geometry(4, 4, 0)
    p = ModelParams(J=1.0, U=HARD_CORE, delta=-1.0, kappa=0.02, beta=0.01)
    with pytest.raises(DimensionGuardError):
        build_liouvillian(g, p, nmax=3)


def test_metastable_gn_full_matches_coherent():
    system = small_system(nx=1, ny=2, u=0.0, nmax=3, beta=0.02)
    state = solve_perturbative_chain(system.blocks)
    mode = uniform_mode(system.blocks.geometry)
    # moments <d^dag^n d^n>; their ratio m2/m1^2 is g2 = 1 for a coherent state
    m1 = metastable_gn_full(state, system.blocks, mode, 1)
    m2 = metastable_gn_full(state, system.blocks, mode, 2)
    assert abs(m2 / m1**2 - 1.0) < 1e-4


def test_liouvillian_annihilates_steady_state():
    system = small_system(nx=1, ny=3)
    rho = exact_steady_state(system)
    v = rho.matrix.reshape(-1, order="F")
    assert np.linalg.norm(system.liouvillian @ v) < 1e-10
