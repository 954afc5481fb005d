import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from scipy.linalg import expm

from cascadenet.amplitudes import CouplingMatrix, coupling_matrix
from cascadenet.dynamics import (
    Superoperator,
    TruncatedState,
    cascade_generator,
    cascade_generator_from_zeta,
    evolve,
    first_moment_drift,
    fock_state,
    gksl_generator,
    lowering_operator,
    moments,
    populations,
    product_state,
)
from cascadenet.errors import PhysicalityError, ResourceCapError, ValidationError
from cascadenet.gksl import build_theta, gksl_decompose, lindblad_closed_form_evenodd
from cascadenet.network import RegularSpec
from cascadenet.regular import design_pruned

from .conftest import networks, random_network


def test_lowering_operator():
    a = lowering_operator(3)
    np.testing.assert_allclose(a, [[0, 1, 0], [0, 0, math.sqrt(2)], [0, 0, 0]])
    with pytest.raises(ValidationError):
        lowering_operator(1)


def single_site(gamma=1.0):
    return cascade_generator_from_zeta(CouplingMatrix(1, np.zeros((1, 1))), gamma)


def test_vacuum_is_stationary():
    gen = single_site()
    traj = evolve(gen, fock_state(1, 2), 2.0, 0.01)
    np.testing.assert_allclose(traj.states[-1].rho, [[1, 0], [0, 0]], atol=1e-14)


def test_single_site_decay():
    traj = evolve(single_site(0.7), fock_state(1, 2, (1,)), 3.0, 1e-3, estimate_error=False)
    for t, st in zip(traj.times[::500], traj.states[::500]):
        assert populations(st)[0] == pytest.approx(math.exp(-0.7 * t), abs=1e-6)


def test_zero_generator_is_identity():
    M, d = 2, 2
    gen = Superoperator(M, d, sp.csr_matrix((d ** (2 * M), d ** (2 * M)), dtype=complex))
    rho0 = fock_state(M, d, (1,), superposed=True)
    np.testing.assert_allclose(evolve(gen, rho0, 1.0, 0.1).states[-1].rho, rho0.rho)


@settings(max_examples=25, deadline=None)
@given(networks(min_M=1, max_M=4))
def test_generator_equivalence(net):
    z = coupling_matrix(net)
    cascade = cascade_generator(net)
    standard = gksl_generator(gksl_decompose(build_theta(z, net.gamma), z))
    assert (cascade - standard).frobenius() < 1e-10
    assert cascade.trace_defect() < 1e-12


def test_generator_equivalence_three_levels(rng):
    net = random_network(rng, 3, loss=0.1)
    z = coupling_matrix(net)
    a = cascade_generator(net, d=3)
    b = gksl_generator(gksl_decompose(build_theta(z, net.gamma), z), d=3)
    assert (a - b).frobenius() < 1e-10


def test_closed_form_generator():
    spec = RegularSpec(4, [0.3, 0.0, 0.5], [-math.pi / 2, 0.0, 1.0])
    a = cascade_generator(spec)
    b = gksl_generator(lindblad_closed_form_evenodd(4, 0.3, 1.0))
    assert (a - b).frobenius() < 1e-10


def test_resource_cap():
    z = CouplingMatrix(3, np.zeros((3, 3)))
    with pytest.raises(ResourceCapError):
        cascade_generator_from_zeta(z, 1.0, d=2, max_dim=2**5)
    with pytest.raises(MemoryError):
        cascade_generator_from_zeta(z, 1.0, d=4, max_dim=4**5)


def test_state_validation():
    with pytest.raises(ValidationError):
        TruncatedState(2, 2, np.eye(3))
    with pytest.raises(ValidationError):
        fock_state(2, 2, (3,))
    with pytest.raises(ValidationError):
        product_state(1, 2, [[1, 0, 0]])
    bad = TruncatedState(1, 2, np.diag([1.2, -0.2]))
    assert any("min eigenvalue" in v for v in bad.violations())


def test_evolve_validation():
    gen = single_site()
    with pytest.raises(ValidationError):
        evolve(gen, fock_state(1, 2), 1.0, 0.0)
    with pytest.raises(ValidationError):
        evolve(gen, fock_state(1, 2), -1.0, 0.1)
    with pytest.raises(ValidationError):
        evolve(gen, fock_state(2, 2), 1.0, 0.1)


def test_coarse_step_flagged():
    gen = cascade_generator(RegularSpec(3, [0.2, 0.5], [0.1, 0.4], gamma=1.0))
    with pytest.raises(PhysicalityError, match="reduce dt"):
        evolve(gen, fock_state(3, 2, (1,)), 2.0, 0.1)


def test_grid_ends_at_final_time():
    traj = evolve(single_site(), fock_state(1, 2, (1,)), 1.0, 0.3)
    assert traj.times[-1] == pytest.approx(1.0)
    assert len(traj.states) == len(traj.times) == 5


def trajectory(rng, excited=(1,), superposed=False, t_final=4.0, dt=0.01):
    net = random_network(rng, 3, loss=0.05)
    gen = cascade_generator(net)
    return net, evolve(gen, fock_state(3, 2, excited, superposed), t_final, dt)


def test_trace_and_positivity(rng):
    _, traj = trajectory(rng, excited=(1, 2))
    for st in traj.states:
        assert abs(np.trace(st.rho) - 1) < 1e-9
        assert np.linalg.eigvalsh(st.rho)[0] > -1e-8
    assert traj.step_error < 1e-8


@pytest.mark.parametrize("source", [2, 3])
def test_chiral_causality(rng, source):
    _, traj = trajectory(rng, excited=(source,))
    for st in traj.states:
        assert np.all(populations(st)[: source - 1] < 1e-9)


def test_first_moments_follow_drift(rng):
    net, traj = trajectory(rng, superposed=True)
    G = first_moment_drift(coupling_matrix(net), net.gamma)
    a0 = moments(traj.states[0])
    for t, st in zip(traj.times[::50], traj.states[::50]):
        np.testing.assert_allclose(moments(st), expm(G * t) @ a0, atol=1e-6)


def test_drift_two_sites():
    G = first_moment_drift(CouplingMatrix(2, np.array([[0, -0.5j], [0, 0]])), 1.0)
    np.testing.assert_allclose(G, [[-0.5, 0], [0.5j, -0.5]])


def test_populations_and_moments():
    st = fock_state(2, 3, (2,), superposed=True)
    np.testing.assert_allclose(populations(st), [0, 0.5], atol=1e-15)
    np.testing.assert_allclose(moments(st), [0, 0.5], atol=1e-15)


def test_pruned_hamiltonian_reverses_under_reflection():
    """For the first-neighbour design with phi_1 = -pi/2 the couplings are real,
    so mirroring the chain flips the sign of the effective Hamiltonian."""
    spec = design_pruned(1, 0.8, phi_base=-math.pi / 2, count=5).to_regular_spec()
    z = coupling_matrix(spec)
    h = gksl_decompose(build_theta(z, 1.0), z).heff_coeffs
    J = np.eye(spec.M)[::-1]
    np.testing.assert_allclose(J @ h @ J, -h, atol=1e-10)


def test_recording_stride_keeps_final_state():
    gen = single_site()
    full = evolve(gen, fock_state(1, 2, (1,)), 1.0, 0.1)
    sparse = evolve(gen, fock_state(1, 2, (1,)), 1.0, 0.1, every=4)
    np.testing.assert_allclose(sparse.times, [0.0, 0.4, 0.8, 1.0])
    np.testing.assert_allclose(sparse.states[-1].rho, full.states[-1].rho)
    assert sparse.step_error == full.step_error
    with pytest.raises(ValidationError):
        evolve(gen, fock_state(1, 2), 1.0, 0.1, every=0)
