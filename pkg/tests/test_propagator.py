"""Free-streaming propagator: unitarity, group law, and oracles."""

import numpy as np
import pytest

from kflab import (
    PhaseField,
    free_evolve,
    interaction_frame,
    make_grid,
    random_field,
    v_to_xi,
)


def _grid():
    return make_grid(d=2, n_modes=8, v_points=16, v_extent=4.0)


def test_identity_at_t0():
    fld = random_field(_grid(), seed=0)
    out = free_evolve(fld, 0.0)
    assert np.array_equal(out.data, fld.data)


def test_group_law_and_unitarity():
    fld = random_field(_grid(), seed=1)
    a = free_evolve(free_evolve(fld, 0.3), 0.45)
    b = free_evolve(fld, 0.75)
    assert np.allclose(a.data, b.data, atol=1e-13)
    assert free_evolve(fld, 0.75).l2_norm() == pytest.approx(
        fld.l2_norm(), rel=1e-13
    )


def test_xi_profile_shift():
    # single x-mode n0: S(t) translates the xi-profile by t*n0
    g = _grid()
    n0 = (2, -1)
    prof = np.exp(-np.sum(g.v_vectors() ** 2, axis=1)).reshape((g.v_points,) * 2)
    data = np.zeros(g.shape, dtype=np.complex128)
    data[n0[0] % g.n_modes, n0[1] % g.n_modes] = prof
    fld = PhaseField(g, data)
    t = g.dxi / 2.0  # shift of exactly one xi node per unit mode, halved
    evolved = v_to_xi(free_evolve(fld, 2.0 * t))
    base = v_to_xi(fld)
    # shift by t*n0 = dxi*(2,-1): one grid step along each axis
    shifted = np.roll(base, shift=(2, -1), axis=(2, 3))
    assert np.allclose(
        evolved[n0[0] % g.n_modes, n0[1] % g.n_modes],
        shifted[n0[0] % g.n_modes, n0[1] % g.n_modes],
        atol=1e-12,
    )


def test_semi_lagrangian_oracle():
    # f(t,x,v) = f0(x - t v, v) for a smooth bump, spectrally accurate
    g = make_grid(d=2, n_modes=32, v_points=12, v_extent=3.0)
    x = g.x_1d
    vv = g.v_vectors().reshape((g.v_points,) * 2 + (2,))
    fx = np.exp(np.cos(x[:, None]) + np.sin(x[None, :]))
    fv = np.exp(-np.sum(vv**2, axis=-1))
    values = fx[..., None, None] * fv[None, None]
    from kflab import x_analyze, x_synthesize

    fld = x_analyze(g, values.astype(np.complex128))
    t = 0.37
    out = x_synthesize(free_evolve(fld, t))
    xs = x[:, None, None, None] - t * vv[None, None, :, :, 0]
    ys = x[None, :, None, None] - t * vv[None, None, :, :, 1]
    expected = np.exp(np.cos(xs) + np.sin(ys)) * fv[None, None]
    assert np.max(np.abs(out - expected)) <= 1e-8


def test_interaction_frame_inverse():
    fld = random_field(_grid(), seed=2)
    t = 0.6
    back = interaction_frame(fld, t, direction="backward")
    fwd = interaction_frame(back, t, direction="forward")
    assert np.allclose(fwd.data, fld.data, atol=1e-13)
    assert np.allclose(
        interaction_frame(fld, t, "backward").data, free_evolve(fld, -t).data
    )
