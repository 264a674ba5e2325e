"""Per-site quantum collision engine.

A node carries ``b`` qubits, one per lattice channel. The channel
occupations ``f_i`` (probability that channel i is occupied) are encoded
into a quantum state, the state is conjugated by a collision unitary, and
new occupations are read off the diagonal of the resulting density matrix.

Index convention used everywhere in this package: basis state ``s`` in
``{0, ..., 2**b - 1}`` has binary digits ``q_1 q_2 ... q_b`` with ``q_1``
the most significant bit, and ``q_i`` is the occupation of channel ``i``.
For b=2 the basis order is therefore {00, 01, 10, 11}.

The module also analyzes how a unitary relates to classical dynamics: the
induced stochastic matrix ``A[p, m] = |U[p, m]|**2`` is doubly stochastic
for any unitary, and the collision constraint ``Re(U[p, m] * conj(U[p, r]))
== 0`` for all p and all m < r is exactly the condition under which
conjugation by U acts on product-state diagonals the same way A acts on
classical state probabilities.
"""

from dataclasses import dataclass, field

import numpy as np

from . import complexlin
from .errors import InputError, InvariantViolation

MAX_QUBITS_PER_NODE = 12

DEFAULT_EPS = complexlin.DEFAULT_EPS


def occupation_bits(b: int) -> np.ndarray:
    """Boolean table of shape (2**b, b): entry [s, i] is q_{i+1}(s).

    Channel 1 occupies the most significant bit of the state index.
    """
    if not 1 <= b <= MAX_QUBITS_PER_NODE:
        raise InputError(
            f"channels per node must be in [1, {MAX_QUBITS_PER_NODE}], got {b}"
        )
    s = np.arange(1 << b)
    shifts = b - 1 - np.arange(b)
    return ((s[:, None] >> shifts[None, :]) & 1).astype(bool)


def validate_occupations(f) -> np.ndarray:
    """Coerce channel occupations to a float vector and range-check them."""
    f = np.asarray(f, dtype=np.float64)
    if f.ndim != 1 or f.size < 1:
        raise InputError(f"occupations must be a nonempty vector, got shape {f.shape}")
    if f.size > MAX_QUBITS_PER_NODE:
        raise InputError(
            f"at most {MAX_QUBITS_PER_NODE} channels per node, got {f.size}"
        )
    if not np.all(np.isfinite(f)):
        raise InputError("occupations contain NaN or Inf")
    if f.min() < 0.0 or f.max() > 1.0:
        raise InputError(f"occupations must lie in [0, 1], got {f!r}")
    return f


def _dim_to_b(dim: int, what: str) -> int:
    b = dim.bit_length() - 1
    if dim < 2 or (1 << b) != dim:
        raise InputError(f"{what} dimension must be a power of two >= 2, got {dim}")
    if b > MAX_QUBITS_PER_NODE:
        raise InputError(
            f"{what} dimension {dim} exceeds the {MAX_QUBITS_PER_NODE}-qubit cap"
        )
    return b


def validate_unitary(u, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Validate a collision operator: square, power-of-two dim, unitary.

    No re-normalization is applied; a matrix that fails the unitarity test
    is rejected outright so user errors in matrix files are not masked.
    """
    u = complexlin.as_complex_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise InputError(f"collision operator must be square, got shape {u.shape}")
    _dim_to_b(u.shape[0], "collision operator")
    residual = complexlin.unitarity_residual(u)
    if residual > eps:
        raise InputError(
            f"collision operator is not unitary: residual {residual:.3g} > {eps:.3g}"
        )
    return u


def encode_pure(f) -> np.ndarray:
    """Encode occupations as a product pure state.

    amplitude[s] = prod_i sqrt(f_i if q_i(s) else 1 - f_i)

    All amplitudes are real and nonnegative (positive square-root branch),
    which pins the otherwise unobservable phases and makes the interference
    analysis reproducible.
    """
    f = validate_occupations(f)
    bits = occupation_bits(f.size)
    amp = np.ones(bits.shape[0])
    for i in range(f.size):
        amp *= np.where(bits[:, i], np.sqrt(f[i]), np.sqrt(1.0 - f[i]))
    return amp.astype(np.complex128)


def boltzmann_probabilities(f) -> np.ndarray:
    """State probabilities under the molecular-chaos (product) approximation.

    n[s] = prod_i (f_i if q_i(s) else 1 - f_i); equals the squared
    amplitudes of ``encode_pure(f)``.
    """
    f = validate_occupations(f)
    bits = occupation_bits(f.size)
    n = np.ones(bits.shape[0])
    for i in range(f.size):
        n *= np.where(bits[:, i], f[i], 1.0 - f[i])
    return n


def density_from_pure(psi, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Rank-1 density matrix psi psi† of a normalized state vector."""
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.ndim != 1:
        raise InputError(f"state vector must be 1-D, got shape {psi.shape}")
    _dim_to_b(psi.size, "state vector")
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1.0) > eps:
        raise InputError(f"state vector is not normalized: |psi|^2 = {norm!r}")
    return np.outer(psi, psi.conj())


def encode_mixed(f) -> np.ndarray:
    """Completely mixed encoding: diagonal density matrix with entries n[s].

    Off-diagonal entries are exactly zero, so conjugation by any unitary
    reproduces the classical action of the induced stochastic matrix.
    """
    return np.diag(boltzmann_probabilities(f)).astype(np.complex128)


def validate_density(rho, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Check Hermiticity, unit trace, and a real diagonal in [0, 1]."""
    rho = complexlin.as_complex_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise InputError(f"density matrix must be square, got shape {rho.shape}")
    _dim_to_b(rho.shape[0], "density matrix")
    if not complexlin.is_hermitian(rho, eps):
        raise InvariantViolation("density matrix is not Hermitian within tolerance")
    diag = np.diagonal(rho)
    if np.abs(diag.imag).max() > eps:
        raise InvariantViolation("density matrix diagonal is not real")
    if diag.real.min() < -eps or diag.real.max() > 1.0 + eps:
        raise InvariantViolation("density matrix diagonal outside [0, 1]")
    if abs(diag.real.sum() - 1.0) > eps:
        raise InvariantViolation(f"density matrix trace is {diag.real.sum()!r}, not 1")
    return rho


def collide(rho, u) -> np.ndarray:
    """One collision: rho -> U rho U†."""
    rho = complexlin.as_complex_matrix(rho)
    u = complexlin.as_complex_matrix(u)
    if rho.shape != u.shape or rho.shape[0] != rho.shape[1]:
        raise InputError(
            f"dimension mismatch: rho {rho.shape} vs operator {u.shape}"
        )
    return u @ rho @ u.conj().T


def readout(rho, eps: float = DEFAULT_EPS) -> np.ndarray:
    """Channel occupations from the density-matrix diagonal.

    f_i = sum over basis states with q_i = 1 of rho[s, s]. Values within
    ``eps`` outside [0, 1] are clamped; a diagonal entry below ``-eps`` or a
    trace off by more than ``eps`` raises ``InvariantViolation``.
    """
    rho = complexlin.as_complex_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise InputError(f"density matrix must be square, got shape {rho.shape}")
    b = _dim_to_b(rho.shape[0], "density matrix")
    diag = np.diagonal(rho)
    if np.abs(diag.imag).max() > eps:
        raise InvariantViolation("density-matrix diagonal has imaginary parts")
    d = diag.real
    if d.min() < -eps:
        raise InvariantViolation(f"negative probability on the diagonal: {d.min()!r}")
    if abs(d.sum() - 1.0) > eps:
        raise InvariantViolation(f"density-matrix trace {d.sum()!r} deviates from 1")
    f = d @ occupation_bits(b).astype(np.float64)
    return np.clip(f, 0.0, 1.0)


@dataclass
class ConstraintReport:
    """Result of evaluating the collision constraint on a unitary.

    ``violations`` lists (p, m, r, Re(U[p,m] conj(U[p,r]))) for every
    entry pair m < r whose real cross product exceeds the tolerance;
    ``max_violation`` is the largest magnitude over all pairs, violating
    or not.
    """

    satisfied: bool
    max_violation: float
    violations: list[tuple[int, int, int, float]] = field(default_factory=list)


def check_collision_constraint(u, eps: float = DEFAULT_EPS) -> ConstraintReport:
    """Evaluate Re(U[p, m] conj(U[p, r])) for all p and all pairs m < r.

    A zero result for every pair is necessary and sufficient for the
    conjugation to act on product-state diagonals as the induced doubly
    stochastic matrix; nonzero entries quantify the interference the
    off-diagonal density-matrix elements feed into the diagonal update.
    """
    u = validate_unitary(u)
    eps = float(eps)
    if eps < 0:
        raise InputError(f"tolerance must be nonnegative, got {eps}")
    dim = u.shape[0]
    cols_m, cols_r = np.triu_indices(dim, k=1)
    violations = []
    max_violation = 0.0
    for p in range(dim):
        cross = (u[p, cols_m] * u[p, cols_r].conj()).real
        mags = np.abs(cross)
        peak = float(mags.max())
        if peak > max_violation:
            max_violation = peak
        for k in np.nonzero(mags > eps)[0]:
            violations.append((p, int(cols_m[k]), int(cols_r[k]), float(cross[k])))
    return ConstraintReport(
        satisfied=not violations,
        max_violation=max_violation,
        violations=violations,
    )


def induced_stochastic(u) -> np.ndarray:
    """Entry-wise modulus squared of a unitary: A[p, m] = |U[p, m]|**2.

    Unitarity guarantees A is doubly stochastic (rows: normalization,
    columns: semi-detailed balance); both sums are verified here and a
    failure is reported as a broken invariant rather than bad input.
    """
    u = validate_unitary(u)
    a = u.real**2 + u.imag**2
    row_err = float(np.abs(a.sum(axis=1) - 1.0).max())
    col_err = float(np.abs(a.sum(axis=0) - 1.0).max())
    if max(row_err, col_err) > DEFAULT_EPS:
        raise InvariantViolation(
            f"induced matrix not doubly stochastic: row err {row_err:.3g}, "
            f"col err {col_err:.3g}"
        )
    return a


def diagonal_update_decomposition(rho, u, eps: float = DEFAULT_EPS):
    """Split the post-collision diagonal into classical and interference parts.

    Returns ``(classical, interference)`` with
    ``classical[p] = sum_m A[p, m] rho[m, m]`` and ``interference`` the
    remainder of the conjugated diagonal. The interference term is computed
    as a difference (one conjugation minus the classical term), which is
    algebraically identical to the double sum over off-diagonal elements.
    Residual imaginary parts above ``eps`` raise ``InvariantViolation``.
    """
    rho = complexlin.as_complex_matrix(rho)
    u = validate_unitary(u)
    if rho.shape != u.shape:
        raise InputError(f"dimension mismatch: rho {rho.shape} vs operator {u.shape}")
    diag_in = np.diagonal(rho)
    if np.abs(diag_in.imag).max() > eps:
        raise InvariantViolation("input diagonal has imaginary parts")
    classical = induced_stochastic(u) @ diag_in.real
    diag_out = np.diagonal(collide(rho, u))
    if np.abs(diag_out.imag).max() > eps:
        raise InvariantViolation("conjugated diagonal has imaginary parts")
    return classical, diag_out.real - classical


def builtin_diffusion_unitary() -> np.ndarray:
    """The 4x4 collision operator of the standard 1-D diffusion model.

    Identity on the empty and doubly occupied states; the single-particle
    block mixes the two channels with entries (1 -+ i)/2. Its induced
    stochastic matrix averages the two single-particle states, and the
    collision constraint is satisfied exactly.
    """
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.5 - 0.5j, 0.5 + 0.5j, 0.0],
            [0.0, 0.5 + 0.5j, 0.5 - 0.5j, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        dtype=np.complex128,
    )


def builtin_violating_unitary() -> np.ndarray:
    """A 4x4 unitary with the same induced stochastic matrix as the
    diffusion model but a maximally violated collision constraint
    (Hadamard block on the single-particle states).

    On product states its diagonal action is nonlinear in the occupations,
    so it is a concrete witness that the constraint is necessary.
    """
    r = np.sqrt(0.5)
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, r, r, 0.0],
            [0.0, r, -r, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ],
        dtype=np.complex128,
    )


def _occupancy_sectors(b: int) -> list[np.ndarray]:
    pops = occupation_bits(b).sum(axis=1)
    return [np.nonzero(pops == k)[0] for k in range(b + 1)]


def random_constrained_unitary(
    b: int,
    rng: np.random.Generator,
    pair_prob: float = 0.8,
    particle_conserving: bool = False,
) -> np.ndarray:
    """Random unitary satisfying the collision constraint.

    Constraint-satisfying unitaries have at most two nonzero entries per
    row, a quarter-phase apart. The generator draws a random pairing of
    basis states, fills each pair with a block

        [[cos t, i sin t], [i sin t, cos t]]

    times independent row phases, gives singletons a bare phase, and then
    permutes the rows. Every operation preserves the constraint.

    With ``particle_conserving`` the pairing and the row permutation stay
    inside fixed-particle-number sectors, the structure of a physical
    lattice-gas collision; only then is the summed occupation a conserved
    quantity of the induced dynamics.
    """
    dim = 1 << b
    if not 1 <= b <= MAX_QUBITS_PER_NODE:
        raise InputError(f"b must be in [1, {MAX_QUBITS_PER_NODE}], got {b}")
    groups = _occupancy_sectors(b) if particle_conserving else [np.arange(dim)]
    u = np.zeros((dim, dim), dtype=np.complex128)
    for group in groups:
        order = rng.permutation(group)
        i = 0
        while i < order.size:
            if i + 1 < order.size and rng.random() < pair_prob:
                j, k = int(order[i]), int(order[i + 1])
                t = rng.uniform(0.0, 2.0 * np.pi)
                ph1 = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
                ph2 = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
                c, s = np.cos(t), np.sin(t)
                u[j, j] = ph1 * c
                u[j, k] = ph1 * 1j * s
                u[k, j] = ph2 * 1j * s
                u[k, k] = ph2 * c
                i += 2
            else:
                j = int(order[i])
                u[j, j] = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
                i += 1
    row_perm = np.arange(dim)
    for group in groups:
        row_perm[group] = rng.permutation(group)
    return u[row_perm, :]


def random_particle_conserving_unitary(b: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary on each fixed-particle-number sector.

    Generic draws violate the collision constraint (the sector blocks are
    full Haar matrices) while still conserving the summed occupation, so
    they exercise the mixed-state universality claim on operators a real
    lattice gas could use.
    """
    dim = 1 << b
    if not 1 <= b <= MAX_QUBITS_PER_NODE:
        raise InputError(f"b must be in [1, {MAX_QUBITS_PER_NODE}], got {b}")
    u = np.zeros((dim, dim), dtype=np.complex128)
    for sector in _occupancy_sectors(b):
        u[np.ix_(sector, sector)] = complexlin.random_unitary(sector.size, rng)
    return u
