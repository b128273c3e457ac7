"""Pure states, named states, canonical-form constructors and seeded sampling.

Basis convention: amplitudes are indexed in mixed radix with party A as the
most significant digit, so for three qubits index ``4*qa + 2*qb + qc`` holds
the coefficient of ``|qa qb qc>``. This is also the order used in state files.

Random sampling uses numpy's ``PCG64`` bit generator through
``numpy.random.Generator`` seeded with the seed reduced
modulo 2**64. Amplitudes are ``standard_normal`` draws, real parts for all
components first and then imaginary parts, normalized afterwards. The first
draws for seed 0 are pinned in the test suite.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadPartyCount, BadRange, DimensionMismatch, NotNormalizable, ParseError

NORM_TOL = 1e-6
ZERO_NORM = 1e-12
SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over a tensor product of parties."""

    dims: tuple[int, ...]
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        amps.setflags(write=False)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def ket(self, *digits: int) -> complex:
        """Amplitude of the basis state ``|digits>``."""
        return complex(self.tensor[tuple(digits)])

    def with_canonical_phase(self) -> "PureState":
        return PureState(self.dims, canonical_phase(self.amplitudes))

    def same_ray(self, other: "PureState", atol: float = 1e-9) -> bool:
        """True if the two states differ only by a global phase."""
        if self.dims != other.dims:
            return False
        return bool(np.allclose(canonical_phase(self.amplitudes), canonical_phase(other.amplitudes), atol=atol))

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "amplitudes": [[float(z.real), float(z.imag)] for z in self.amplitudes],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def __repr__(self):
        return f"PureState(dims={self.dims}, amplitudes={np.array2string(self.amplitudes, precision=4)})"


def canonical_phase(amplitudes: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate the global phase so the first non-negligible amplitude is real positive."""
    amps = np.asarray(amplitudes, dtype=complex)
    nonzero = np.flatnonzero(np.abs(amps) > tol)
    if nonzero.size == 0:
        return amps.copy()
    lead = amps[nonzero[0]]
    return amps * (abs(lead) / lead)


def basis_index(digits: Sequence[int], dims: Sequence[int]) -> int:
    return int(np.ravel_multi_index(tuple(digits), tuple(dims)))


def basis_digits(index: int, dims: Sequence[int]) -> tuple[int, ...]:
    return tuple(int(i) for i in np.unravel_index(index, tuple(dims)))


def _check_dims(dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims):
        raise DimensionMismatch(f"every party needs dimension >= 2, got {dims}")
    return dims


def from_amplitudes(dims, amplitudes, *, strict: bool = False) -> PureState:
    """Validate and normalize an amplitude vector.

    Any vector with norm above 1e-12 is rescaled to unit norm. With
    ``strict=True`` (used when reading state files) the norm must already
    lie within ``1 +- 1e-6``.
    """
    dims = _check_dims(dims)
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if amps.size != math.prod(dims):
        raise DimensionMismatch(f"{amps.size} amplitudes for dims {dims}")
    norm = float(np.linalg.norm(amps))
    if not np.isfinite(norm) or norm < ZERO_NORM:
        raise NotNormalizable(f"amplitude norm {norm:.3e} is too small")
    if strict and abs(norm - 1.0) > NORM_TOL:
        raise NotNormalizable(f"amplitude norm {norm:.9f} is not within {NORM_TOL} of 1")
    if abs(norm - 1.0) <= 4 * np.finfo(float).eps:
        # already unit to rounding; keeps file round trips bit-exact
        return PureState(dims, amps)
    return PureState(dims, amps / norm)


def basis_state(digits: Sequence[int], dims: Sequence[int] | None = None) -> PureState:
    dims = tuple(dims) if dims is not None else (2,) * len(digits)
    amps = np.zeros(math.prod(dims), dtype=complex)
    amps[basis_index(digits, dims)] = 1.0
    return PureState(dims, amps)


def product_state(*vectors) -> PureState:
    out = np.ones(1, dtype=complex)
    for v in vectors:
        out = np.kron(out, np.asarray(v, dtype=complex))
    return from_amplitudes(tuple(len(v) for v in vectors), out)


def ghz() -> PureState:
    amps = np.zeros(8, dtype=complex)
    amps[0] = amps[7] = 1 / math.sqrt(2)
    return PureState((2, 2, 2), amps)


def w_n(n: int) -> PureState:
    """Symmetric one-excitation state on ``n`` qubits."""
    if n < 3:
        raise BadPartyCount(f"W_N needs N >= 3, got {n}")
    amps = np.zeros(2**n, dtype=complex)
    amps[[1 << k for k in range(n)]] = 1 / math.sqrt(n)
    return PureState((2,) * n, amps)


def w() -> PureState:
    return w_n(3)


def epr() -> PureState:
    return from_amplitudes((2, 2), [1, 0, 0, 1])


def bipartite_representative(label: str) -> PureState:
    """Representatives of the classes A-BC, B-AC, C-AB (one qubit in |0>, other two in EPR)."""
    zero = np.array([1.0, 0.0])
    bell = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2)
    if label == "A-BC":
        amps = np.kron(zero, bell)
    elif label == "C-AB":
        amps = np.kron(bell, zero)
    elif label == "B-AC":
        amps = np.einsum("ac,b->abc", bell.reshape(2, 2), zero).reshape(-1)
    else:
        raise ValueError(f"not a bipartite class label: {label!r}")
    return PureState((2, 2, 2), amps)


@dataclass(frozen=True)
class GhzCanonicalParams:
    """Coordinates of the five-parameter GHZ-class standard form.

    ``sqrt(K) (cos(delta)|000> + sin(delta) e^{i phi} |phi_A phi_B phi_C>)``
    with ``|phi_A> = cos(alpha)|0> + sin(alpha)|1>`` and likewise for B, C.
    """

    delta: float
    alpha: float
    beta: float
    gamma: float
    phi: float

    @property
    def K(self) -> float:
        cd, sd = math.cos(self.delta), math.sin(self.delta)
        overlap = math.cos(self.alpha) * math.cos(self.beta) * math.cos(self.gamma)
        return 1.0 / (1.0 + 2.0 * cd * sd * overlap * math.cos(self.phi))

    def validate(self, atol: float = 1e-12) -> "GhzCanonicalParams":
        if not (0.0 < self.delta <= math.pi / 4 + atol):
            raise BadRange(f"delta={self.delta} outside (0, pi/4]")
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not (0.0 < value <= math.pi / 2 + atol):
                raise BadRange(f"{name}={value} outside (0, pi/2]")
        if not (-atol <= self.phi < 2 * math.pi + atol):
            raise BadRange(f"phi={self.phi} outside [0, 2pi)")
        return self

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.delta, self.alpha, self.beta, self.gamma, self.phi)

    def to_dict(self) -> dict:
        return {"K": self.K, "delta": self.delta, "alpha": self.alpha, "beta": self.beta,
                "gamma": self.gamma, "phi": self.phi}


@dataclass(frozen=True)
class WCanonicalParams:
    """Weights of ``sqrt(a)|001> + sqrt(b)|010> + sqrt(c)|100> + sqrt(d)|000>``."""

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def from_abc(cls, a: float, b: float, c: float) -> "WCanonicalParams":
        return cls(a, b, c, 1.0 - (a + b + c))

    def validate(self, atol: float = 1e-10) -> "WCanonicalParams":
        if min(self.a, self.b, self.c) <= 0.0:
            raise BadRange(f"a, b, c must be positive: {self.as_tuple()}")
        if self.d < -atol:
            raise BadRange(f"d={self.d} is negative")
        if abs(self.a + self.b + self.c + self.d - 1.0) > atol:
            raise BadRange(f"weights sum to {self.a + self.b + self.c + self.d}, not 1")
        return self

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}


@dataclass(frozen=True)
class SchmidtDecomposition:
    """``psi = sum_i sqrt(coefficients[i]) left[:, i] (x) right[:, i]``."""

    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def schmidt_number(self) -> int:
        return int(self.coefficients.size)

    def reconstruct(self) -> np.ndarray:
        return np.einsum("i,ai,bi->ab", np.sqrt(self.coefficients), self.left, self.right).reshape(-1)


def state_from_ghz_params(p: GhzCanonicalParams) -> PureState:
    p.validate()
    cd, sd = math.cos(p.delta), math.sin(p.delta)
    phis = [np.array([math.cos(x), math.sin(x)]) for x in (p.alpha, p.beta, p.gamma)]
    second = np.kron(np.kron(phis[0], phis[1]), phis[2])
    amps = np.zeros(8, dtype=complex)
    amps[0] = cd
    amps = amps + sd * np.exp(1j * p.phi) * second
    amps *= math.sqrt(p.K)
    # K is exact up to roundoff; renormalize so the stored state has unit norm
    return PureState((2, 2, 2), amps / np.linalg.norm(amps))


def state_from_w_params(q: WCanonicalParams) -> PureState:
    q.validate()
    amps = np.zeros(8, dtype=complex)
    amps[0b001] = math.sqrt(q.a)
    amps[0b010] = math.sqrt(q.b)
    amps[0b100] = math.sqrt(q.c)
    amps[0b000] = math.sqrt(max(q.d, 0.0))
    return PureState((2, 2, 2), amps / np.linalg.norm(amps))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & SEED_MASK))


def random_amplitudes(rng: np.random.Generator, n: int, size: int | None = None) -> np.ndarray:
    """Normalized complex Gaussian vectors; shape ``(n,)`` or ``(size, n)``."""
    shape = (n,) if size is None else (size, n)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def random_pure(dims, seed: int) -> PureState:
    """Haar-random pure state, deterministic in ``seed``."""
    dims = _check_dims(dims)
    return PureState(dims, random_amplitudes(make_rng(seed), math.prod(dims)))


def random_ghz_params(rng: np.random.Generator) -> GhzCanonicalParams:
    """Uniform draw over the parameter box (open ends avoided)."""
    tiny = 1e-6
    return GhzCanonicalParams(
        delta=float(rng.uniform(tiny, math.pi / 4)),
        alpha=float(rng.uniform(tiny, math.pi / 2)),
        beta=float(rng.uniform(tiny, math.pi / 2)),
        gamma=float(rng.uniform(tiny, math.pi / 2)),
        phi=float(rng.uniform(0.0, 2 * math.pi)),
    )


def random_w_params(rng: np.random.Generator) -> WCanonicalParams:
    """Uniform draw on the simplex a + b + c + d = 1 (flat Dirichlet)."""
    while True:
        a, b, c, d = rng.dirichlet(np.ones(4))
        if min(a, b, c) > 1e-6:
            return WCanonicalParams(float(a), float(b), float(c), float(1.0 - (a + b + c)))


def load_state(path) -> PureState:
    """Read a state file ``{"dims": [...], "amplitudes": [[re, im], ...]}``."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read state file {path}: {exc}") from exc
    return state_from_dict(data)


def state_from_dict(data) -> PureState:
    try:
        dims = [int(d) for d in data["dims"]]
        pairs = data["amplitudes"]
        amps = np.array([complex(float(re), float(im)) for re, im in pairs])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed state object: {exc}") from exc
    try:
        return from_amplitudes(dims, amps, strict=True)
    except (DimensionMismatch, NotNormalizable) as exc:
        raise ParseError(str(exc)) from exc


def save_state(psi: PureState, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(psi.to_dict(), fh, indent=1)
        fh.write("\n")
