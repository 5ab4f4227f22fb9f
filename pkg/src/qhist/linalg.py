"""Dense complex linear algebra kernel: inner products, Kronecker products,
certified projectors, and unitary propagators for small Hilbert spaces.

Everything works on plain ``numpy`` arrays (``complex128``). State vectors are
1-D, operators are square 2-D. Dimensions stay in the single digits, so all
routines favour clarity and exactness over scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Tolerances used throughout the package.
EPS_OP = 1e-10     # operator identities (hermiticity, idempotence, commutators)
EPS_NORM = 1e-12   # state norms and probability sums
EPS_CONS = 1e-10   # history-overlap consistency threshold


def as_state(v) -> np.ndarray:
    """Coerce to a 1-D complex vector."""
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"expected a 1-D state vector, got shape {arr.shape}")
    return arr


def as_operator(m) -> np.ndarray:
    """Coerce to a square complex matrix."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ValueError(f"expected a square operator, got shape {arr.shape}")
    return arr


def inner(u, v) -> complex:
    """Inner product <u|v>, conjugate-linear in the first argument."""
    u = as_state(u)
    v = as_state(v)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}")
    return complex(np.vdot(u, v))


def norm(v) -> float:
    return float(np.linalg.norm(as_state(v)))


def normalized(v) -> np.ndarray:
    """Return v / ||v||; rejects (near-)zero vectors."""
    v = as_state(v)
    n = np.linalg.norm(v)
    if n < 1e-14:
        raise ValueError("cannot normalize a zero vector")
    return v / n


def tensor(a, b) -> np.ndarray:
    """Kronecker product of two vectors or two operators.

    Ordering is fixed: the first factor varies slowest, i.e. the composite
    index is (i_a, i_b) in row-major order. All two-spin code in this package
    relies on that convention.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != b.ndim or a.ndim not in (1, 2):
        raise ValueError("tensor expects two vectors or two square operators")
    if a.ndim == 2:
        a, b = as_operator(a), as_operator(b)
    return np.kron(a, b)


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def max_abs(m) -> float:
    """Entrywise max-norm, the metric used by all operator tolerances here."""
    return float(np.max(np.abs(m))) if np.size(m) else 0.0


def is_hermitian(m, tol: float = EPS_OP) -> bool:
    m = as_operator(m)
    return max_abs(m - m.conj().T) <= tol


def is_unitary(u, tol: float = EPS_OP) -> bool:
    u = as_operator(u)
    return max_abs(u.conj().T @ u - identity(u.shape[0])) <= tol


def commutes(p, q, tol: float = EPS_OP) -> bool:
    """True iff the entrywise norm of [P, Q] is within tol."""
    p = as_operator(p)
    q = as_operator(q)
    if p.shape != q.shape:
        raise ValueError(f"dimension mismatch: {p.shape[0]} vs {q.shape[0]}")
    return max_abs(p @ q - q @ p) <= tol


@dataclass(frozen=True, eq=False)
class Projector:
    """A certified orthogonal projector with a short display label.

    Instances are produced by :func:`as_projector` / :func:`projector_onto`,
    which verify self-adjointness and idempotence; the matrix is stored
    read-only. Labels identify events inside history families ("x1+", "1",
    "psi2", ...), and label equality is how the package compares events.
    """

    matrix: np.ndarray = field(repr=False)
    label: str = ""

    def __post_init__(self):
        m = as_operator(self.matrix).copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __repr__(self) -> str:
        return f"Projector({self.label!r}, dim={self.dim})"


def is_projector(m, tol: float = EPS_OP) -> bool:
    m = as_operator(m)
    return is_hermitian(m, tol) and max_abs(m @ m - m) <= tol


def as_projector(m, label: str = "", tol: float = EPS_OP) -> Projector:
    """Certify a matrix as a projector; raises ValueError if it is not one."""
    m = as_operator(m)
    if not is_hermitian(m, tol):
        raise ValueError(f"projector {label!r}: matrix is not self-adjoint")
    if max_abs(m @ m - m) > tol:
        raise ValueError(f"projector {label!r}: matrix is not idempotent")
    return Projector(m, label)


def projector_onto(v, label: str = "") -> Projector:
    """Rank-1 projector |v><v| onto the (normalized) span of v."""
    v = normalized(v)
    return Projector(np.outer(v, v.conj()), label)


def identity_projector(dim: int, label: str = "1") -> Projector:
    return Projector(identity(dim), label)


def unitary_exp(h, duration: float) -> np.ndarray:
    """exp(-i * h * duration) for a self-adjoint generator, with hbar = 1.

    Uses the eigendecomposition of h rather than a power series, so the
    result is unitary up to diagonalization error even for long durations.
    """
    h = as_operator(h)
    if not is_hermitian(h):
        raise ValueError("unitary_exp requires a self-adjoint generator")
    w, vecs = np.linalg.eigh(h)
    phases = np.exp(-1j * w * duration)
    return (vecs * phases) @ vecs.conj().T


def states_equal_up_to_phase(u, v, tol: float = 1e-9) -> bool:
    """Physical equality of unit vectors: |<u|v>| = 1 within tol."""
    u = normalized(u)
    v = normalized(v)
    return abs(abs(np.vdot(u, v)) - 1.0) <= tol
