"""Littlewood-Paley projectors in x and v, and modulation localization."""

import numpy as np
import pytest

from kflab import (
    PhaseField,
    bump,
    bump_psi,
    free_evolve,
    make_grid,
    project_modulation,
    project_v_dyadic,
    project_x_block,
    project_x_shell,
    random_field,
    sample_free_evolution,
)
from kflab.lp import v_multiplier
from kflab.trajectory import max_bracket


def _grid():
    return make_grid(d=2, n_modes=16, v_points=8, v_extent=4.0)


def test_bump_plateau_and_support():
    rho = np.array([0.0, 0.5, 1.0, 2.0, 3.0])
    vals = bump(rho)
    assert np.allclose(vals[:3], 1.0)
    assert np.allclose(vals[3:], 0.0)
    assert 0.0 < bump(np.array([1.5]))[0] < 1.0
    assert np.allclose(bump_psi(np.array([-0.7, 0.7])), 1.0)
    assert np.allclose(bump_psi(np.array([-2.5, 2.5])), 0.0)


def test_x_shells_disjoint_and_partition():
    g = _grid()
    fld = random_field(g, seed=0)
    shells = [project_x_shell(fld, N) for N in (1, 2, 4, 8)]
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            cross = project_x_shell(shells[i], 2 ** j if j else 1)
            assert cross.l2_norm() == 0.0
    total = shells[0]
    for s in shells[1:]:
        total = total + s
    assert np.allclose(total.data, fld.data, atol=0.0)


def test_single_mode_shell_membership():
    g = _grid()
    data = np.zeros(g.shape, dtype=np.complex128)
    data[3, 0] = 1.0
    fld = PhaseField(g, data)
    assert project_x_shell(fld, 4).l2_norm() > 0.0
    for N in (1, 2, 8):
        assert project_x_shell(fld, N).l2_norm() == 0.0


def test_shell_too_large_rejected():
    g = _grid()
    fld = random_field(g, seed=1)
    with pytest.raises(ValueError):
        project_x_shell(fld, 16)


def test_block_zero_center_superset():
    g = _grid()
    fld = random_field(g, seed=2)
    shell = project_x_shell(fld, 4)
    block = project_x_block(fld, (0, 0), 4)
    # the centered block is the full cube (-N, N]^d, a superset of the shell
    assert np.allclose(
        project_x_block(shell, (0, 0), 4).data, shell.data, atol=0.0
    )
    assert block.l2_norm() >= shell.l2_norm()


def test_block_translated_membership_and_tiling():
    g = _grid()
    data = np.zeros(g.shape, dtype=np.complex128)
    data[(5 % 16), (7 % 16)] = 1.0
    fld = PhaseField(g, data)
    # mode (5, 7) = a + n0 with a = (4, 8), n0 = (1, -1) in (-2, 2]^2
    assert project_x_block(fld, (4, 8), 2).l2_norm() == pytest.approx(
        fld.l2_norm()
    )
    assert project_x_block(fld, (0, 0), 2).l2_norm() == 0.0
    # blocks centered on 2N Z^d partition the mode lattice
    rnd = random_field(g, seed=3)
    total = None
    for a0 in (-8, -4, 0, 4, 8):
        for a1 in (-8, -4, 0, 4, 8):
            piece = project_x_block(rnd, (a0, a1), 2)
            total = piece if total is None else total + piece
    assert np.allclose(total.data, rnd.data, atol=0.0)


def test_v_multiplier_telescope_and_support():
    g = make_grid(d=2, n_modes=2, v_points=64, v_extent=16.0)
    vv = g.v_vectors()
    speeds = np.linalg.norm(vv, axis=1)
    total = sum(v_multiplier(g, 2**k) for k in range(0, 4))
    expected = bump(speeds / 2**3) - bump(2.0 * speeds)
    assert np.max(np.abs(total.ravel() - expected)) <= 1e-12
    m4 = v_multiplier(g, 4).ravel()
    assert np.all(m4[speeds >= 8.0] == 0.0)
    assert np.all(m4[speeds <= 1.0] == 0.0)


def test_v_projector_not_idempotent():
    g = make_grid(d=2, n_modes=2, v_points=32, v_extent=8.0)
    fld = random_field(g, seed=4)
    once = project_v_dyadic(fld, 2)
    twice = project_v_dyadic(once, 2)
    diff = PhaseField(g, twice.data - once.data)
    assert diff.l2_norm() > 1e-6 * once.l2_norm()


def test_modulation_partition_and_orthogonality():
    g = make_grid(d=2, n_modes=4, v_points=8, v_extent=4.0)
    phi = random_field(g, seed=5)
    traj = sample_free_evolution(phi, t_half=2.0, n_samples=33)
    traj.data = traj.data * np.random.default_rng(6).standard_normal(
        (traj.n_samples,) + (1,) * (2 * g.d)
    )
    limit = max_bracket(traj)
    Ks = [1]
    while Ks[-1] < limit:
        Ks.append(Ks[-1] * 2)
    pieces = [project_modulation(traj, K) for K in Ks]
    total = np.sum([p.data for p in pieces], axis=0)
    assert np.max(np.abs(total - traj.data)) <= 1e-12 * traj.sup_l2()
    cross = project_modulation(pieces[0], Ks[1])
    assert np.max(np.abs(cross.data)) <= 1e-13
    again = project_modulation(pieces[1], Ks[1])
    assert np.max(np.abs(again.data - pieces[1].data)) <= 1e-12


def test_modulation_nyquist_guard():
    g = make_grid(d=2, n_modes=4, v_points=8, v_extent=4.0)
    traj = sample_free_evolution(random_field(g, seed=7), 1.0, 9)
    with pytest.raises(ValueError):
        project_modulation(traj, 2 ** 20)


def test_free_evolution_concentrates_at_zero_modulation():
    # S(t)phi demodulates to tau' = 0 exactly; Q_1 keeps nearly all mass
    g = make_grid(d=2, n_modes=4, v_points=8, v_extent=4.0)
    phi = random_field(g, seed=8)
    traj = sample_free_evolution(phi, t_half=4.0, n_samples=65)
    kept = project_modulation(traj, 1)
    num = np.sqrt(np.sum(np.abs(kept.data) ** 2))
    den = np.sqrt(np.sum(np.abs(traj.data) ** 2))
    assert num / den >= 0.9
