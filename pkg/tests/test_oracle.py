import numpy as np
import pytest
from numpy.testing import assert_allclose

from qlgas import lattice, node, oracle
from qlgas.errors import InputError
from qlgas.lattice import CollisionMode


def brute_force_collide(f, a):
    """Third, fully explicit route: enumerate every basis state."""
    b = len(f)
    d = 1 << b
    n = np.zeros(d)
    for s in range(d):
        prob = 1.0
        for i in range(b):
            bit = (s >> (b - 1 - i)) & 1
            prob *= f[i] if bit else 1.0 - f[i]
        n[s] = prob
    n2 = a @ n
    out = np.zeros(b)
    for s in range(d):
        for i in range(b):
            if (s >> (b - 1 - i)) & 1:
                out[i] += n2[s]
    return out


def shannon_entropy(p):
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def diffusion_a():
    return node.induced_stochastic(node.builtin_diffusion_unitary())


# ---------------------------------------------------------------- collisions

def test_lb_collide_identity():
    f = np.array([0.3, 0.8])
    assert_allclose(oracle.lb_collide(f, np.eye(4)), f, atol=1e-14)


def test_lb_collide_diffusion_averages_channels():
    rng = np.random.default_rng(0)
    a = diffusion_a()
    for _ in range(10):
        f1, f2 = rng.uniform(0, 1, 2)
        out = oracle.lb_collide([f1, f2], a)
        assert_allclose(out, [(f1 + f2) / 2] * 2, atol=1e-14)


def test_lb_collide_example_values():
    assert_allclose(
        oracle.lb_collide([0.5, 0.25], diffusion_a()), [0.375, 0.375], atol=1e-14
    )


def test_lb_collide_matches_brute_force_enumeration():
    rng = np.random.default_rng(1)
    for b in (1, 2, 3):
        for _ in range(10):
            a = oracle.random_doubly_stochastic(1 << b, rng)
            f = rng.uniform(0, 1, b)
            assert_allclose(
                oracle.lb_collide(f, a), brute_force_collide(f, a), atol=1e-12
            )


def test_lb_collide_conserves_state_probability_mass():
    rng = np.random.default_rng(2)
    a = oracle.random_doubly_stochastic(8, rng)
    f = rng.uniform(0, 1, 3)
    bits = oracle._state_bit_table(3)
    n = oracle._expand(f[None, :], bits)[0]
    assert abs((a @ n).sum() - n.sum()) <= 1e-14


def test_lb_collide_diffusion_conserves_density():
    rng = np.random.default_rng(3)
    f = rng.uniform(0, 1, 2)
    out = oracle.lb_collide(f, diffusion_a())
    assert abs(out.sum() - f.sum()) <= 1e-14


def test_lb_collide_rejects_bad_inputs():
    with pytest.raises(InputError):
        oracle.lb_collide([0.5, 1.5], np.eye(4))
    with pytest.raises(InputError):
        oracle.lb_collide([0.5, 0.5], np.eye(8))
    not_stochastic = np.array([[0.9, 0.0], [0.0, 0.9]])
    with pytest.raises(InputError):
        oracle.lb_collide([0.5], not_stochastic)


# ---------------------------------------------------------------------- runs

def test_lb_run_identity_constant_series():
    f = np.random.default_rng(4).uniform(0, 1, (8, 2))
    series = oracle.lb_run(f, np.eye(4), [0, 0], steps=5, record_every=1)
    for frame in series.frames:
        assert_allclose(frame, f, atol=1e-14)


def test_lb_run_density_obeys_averaging_recurrence():
    rng = np.random.default_rng(5)
    f = np.zeros((32, 2))
    f[16] = (0.5, 0.5)
    f[10] = rng.uniform(0, 1, 2)
    series = oracle.lb_run(f, diffusion_a(), steps=10, record_every=1)
    for k in range(len(series.times) - 1):
        rho_now = lattice.density_profile(series.frames[k])
        rho_next = lattice.density_profile(series.frames[k + 1])
        expected = 0.5 * (np.roll(rho_now, 1) + np.roll(rho_now, -1))
        assert_allclose(rho_next, expected, atol=1e-12)


def test_lb_run_matches_quantum_pure_run():
    rng = np.random.default_rng(6)
    f = rng.uniform(0, 1, (64, 2))
    u = node.builtin_diffusion_unitary()
    quantum = lattice.run(f, u, steps=100, record_every=10)
    classical = oracle.lb_run(f, diffusion_a(), steps=100, record_every=10)
    dev, _ = oracle.compare_runs(quantum, classical)
    assert dev <= 1e-10


# ------------------------------------------------------------------- compare

def test_compare_runs_identical_zero():
    f = np.random.default_rng(7).uniform(0, 1, (8, 2))
    s = oracle.lb_run(f, diffusion_a(), steps=3)
    dev, _ = oracle.compare_runs(s, s)
    assert dev == 0.0


def test_compare_runs_locates_single_cell_difference():
    f = np.random.default_rng(8).uniform(0.2, 0.8, (8, 2))
    s1 = oracle.lb_run(f, diffusion_a(), steps=3, record_every=1)
    s2 = oracle.lb_run(f, diffusion_a(), steps=3, record_every=1)
    s2.frames = s2.frames.copy()
    s2.frames[2, 5, 0] += 1e-3
    dev, (x, t) = oracle.compare_runs(s1, s2)
    assert dev == pytest.approx(1e-3)
    assert (x, t) == (5, int(s1.times[2]))


def test_compare_runs_rejects_shape_mismatch():
    f = np.random.default_rng(9).uniform(0, 1, (8, 2))
    s1 = oracle.lb_run(f, diffusion_a(), steps=2)
    s2 = oracle.lb_run(f, diffusion_a(), steps=3)
    with pytest.raises(InputError):
        oracle.compare_runs(s1, s2)


# -------------------------------------------------------------------- markov

def test_markov_uniform_is_stationary():
    rng = np.random.default_rng(10)
    a = oracle.random_doubly_stochastic(8, rng)
    p = np.full(8, 1 / 8)
    out = oracle.markov_power_iterate(a, p, steps=20)
    assert np.abs(out - p).max() <= 1e-12


def test_markov_empty_state_invariant_under_diffusion():
    p = np.array([1.0, 0.0, 0.0, 0.0])
    out = oracle.markov_power_iterate(diffusion_a(), p, steps=5)
    assert_allclose(out, p, atol=1e-14)


def test_markov_single_particle_splits():
    p = np.array([0.0, 1.0, 0.0, 0.0])
    out = oracle.markov_power_iterate(diffusion_a(), p, steps=1)
    assert_allclose(out, [0.0, 0.5, 0.5, 0.0], atol=1e-14)


def test_markov_rejects_unnormalized():
    with pytest.raises(InputError):
        oracle.markov_power_iterate(diffusion_a(), np.array([0.5, 0.0, 0.0, 0.0]))


def test_markov_entropy_never_decreases():
    rng = np.random.default_rng(11)
    for _ in range(20):
        dim = int(rng.choice([2, 4, 8]))
        a = oracle.random_doubly_stochastic(dim, rng)
        p = rng.uniform(0, 1, dim)
        p /= p.sum()
        h_before = shannon_entropy(p)
        h_after = shannon_entropy(oracle.markov_power_iterate(a, p, 1))
        assert h_after >= h_before - 1e-12


def test_random_doubly_stochastic_is_doubly_stochastic():
    rng = np.random.default_rng(12)
    a = oracle.random_doubly_stochastic(16, rng)
    assert np.abs(a.sum(axis=0) - 1.0).max() <= 1e-10
    assert np.abs(a.sum(axis=1) - 1.0).max() <= 1e-10


# --------------------------------------------------- independence of the path

def test_oracle_path_stays_real_valued():
    # the reference path never touches complex arithmetic
    rng = np.random.default_rng(13)
    a = diffusion_a()
    assert a.dtype == np.float64
    out = oracle.lb_collide(rng.uniform(0, 1, 2), a)
    assert out.dtype == np.float64
    series = oracle.lb_run(rng.uniform(0, 1, (8, 2)), a, steps=3)
    assert series.frames.dtype == np.float64
    p = oracle.markov_power_iterate(a, np.array([0.0, 1.0, 0.0, 0.0]), 2)
    assert p.dtype == np.float64
