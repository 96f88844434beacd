"""Pauli strings and Pauli sums.

Factor strings are indexed by qubit: ``"ZX"`` is Z on qubit 0 and X on qubit 1.
Qubit 0 is the least significant bit of a basis-state index, so the dense
matrix of ``"ZX"`` is ``kron(X, Z)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionError, ResourceError

DENSE_QUBIT_CAP = 14
DROP_TOL = 1e-12

_PHASES = (1.0 + 0j, 1j, -1.0 + 0j, -1j)

# (a, b) -> (power of i, product factor)
_MUL = {
    ("I", "I"): (0, "I"), ("I", "X"): (0, "X"), ("I", "Y"): (0, "Y"), ("I", "Z"): (0, "Z"),
    ("X", "I"): (0, "X"), ("X", "X"): (0, "I"), ("X", "Y"): (1, "Z"), ("X", "Z"): (3, "Y"),
    ("Y", "I"): (0, "Y"), ("Y", "X"): (3, "Z"), ("Y", "Y"): (0, "I"), ("Y", "Z"): (1, "X"),
    ("Z", "I"): (0, "Z"), ("Z", "X"): (1, "Y"), ("Z", "Y"): (3, "X"), ("Z", "Z"): (0, "I"),
}


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis times ``i**phase_power``."""

    factors: str
    phase_power: int = 0

    def __post_init__(self):
        if not self.factors:
            raise DimensionError("PauliString needs at least one qubit")
        bad = set(self.factors) - set("IXYZ")
        if bad:
            raise ValueError(f"invalid Pauli factors {sorted(bad)}")
        object.__setattr__(self, "phase_power", self.phase_power % 4)

    @classmethod
    def identity(cls, width: int) -> "PauliString":
        return cls("I" * width)

    @classmethod
    def from_sparse(cls, width: int, ops: dict[int, str]) -> "PauliString":
        """Build from ``{qubit: 'X'|'Y'|'Z'}``; unspecified qubits are I."""
        chars = ["I"] * width
        for q, p in ops.items():
            if not 0 <= q < width:
                raise DimensionError(f"qubit {q} outside width {width}")
            chars[q] = p
        return cls("".join(chars))

    @property
    def width(self) -> int:
        return len(self.factors)

    @property
    def phase(self) -> complex:
        return _PHASES[self.phase_power]

    @property
    def is_hermitian(self) -> bool:
        return self.phase_power in (0, 2)

    @property
    def is_identity(self) -> bool:
        return set(self.factors) == {"I"}

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, f in enumerate(self.factors) if f != "I")

    def masks(self) -> tuple[int, int, complex]:
        """``(xmask, zmask, i**n_Y)``; the string's own phase is not included."""
        x = z = 0
        ny = 0
        for q, f in enumerate(self.factors):
            if f in "XY":
                x |= 1 << q
            if f in "ZY":
                z |= 1 << q
            if f == "Y":
                ny += 1
        return x, z, _PHASES[ny % 4]

    def canonical(self) -> "PauliString":
        return PauliString(self.factors) if self.phase_power else self

    def padded(self, width: int) -> "PauliString":
        if width < self.width:
            raise DimensionError("cannot pad to a smaller width")
        return PauliString(self.factors + "I" * (width - self.width), self.phase_power)

    def __matmul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def __str__(self):
        prefix = {0: "", 1: "i", 2: "-", 3: "-i"}[self.phase_power]
        return prefix + self.factors


def _check_width(a, b):
    if a.width != b.width:
        raise DimensionError(f"width mismatch: {a.width} vs {b.width}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    _check_width(a, b)
    power = a.phase_power + b.phase_power
    out = []
    for fa, fb in zip(a.factors, b.factors):
        k, f = _MUL[fa, fb]
        power += k
        out.append(f)
    return PauliString("".join(out), power)


def inverse(a: PauliString) -> PauliString:
    # every factor squares to I, so only the phase needs conjugating
    return PauliString(a.factors, -a.phase_power)


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_width(a, b)
    clashes = sum(1 for fa, fb in zip(a.factors, b.factors)
                  if fa != "I" and fb != "I" and fa != fb)
    return clashes % 2 == 0


class PauliSum:
    """Linear combination of canonical-phase Pauli strings.

    Instances are treated as immutable.  Arithmetic returns simplified sums.
    """

    __slots__ = ("width", "terms")

    def __init__(self, width: int, terms: Iterable[tuple[complex, PauliString]] = ()):
        if width < 1:
            raise DimensionError("PauliSum needs at least one qubit")
        folded = []
        for c, s in terms:
            if s.width != width:
                raise DimensionError(f"term width {s.width} != sum width {width}")
            folded.append((complex(c) * s.phase, s.canonical()))
        self.width = width
        self.terms = tuple(folded)

    @classmethod
    def from_string(cls, s: PauliString, coeff: complex = 1.0) -> "PauliSum":
        return cls(s.width, [(coeff, s)])

    @classmethod
    def identity(cls, width: int, coeff: complex = 1.0) -> "PauliSum":
        return cls(width, [(coeff, PauliString.identity(width))])

    @classmethod
    def zero(cls, width: int) -> "PauliSum":
        return cls(width)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __add__(self, other: "PauliSum") -> "PauliSum":
        if other.width != self.width:
            raise DimensionError(f"width mismatch: {self.width} vs {other.width}")
        return simplify(PauliSum(self.width, self.terms + other.terms))

    def __neg__(self):
        return PauliSum(self.width, [(-c, s) for c, s in self.terms])

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-other)

    def __mul__(self, scalar) -> "PauliSum":
        return simplify(PauliSum(self.width, [(scalar * c, s) for c, s in self.terms]))

    __rmul__ = __mul__

    def __matmul__(self, other: "PauliSum") -> "PauliSum":
        if other.width != self.width:
            raise DimensionError(f"width mismatch: {self.width} vs {other.width}")
        prods = [(ca * cb, multiply(sa, sb))
                 for ca, sa in self.terms for cb, sb in other.terms]
        return simplify(PauliSum(self.width, prods))

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.width == other.width and simplify(self).terms == simplify(other).terms

    def __repr__(self):
        return f"PauliSum({self.width}, {list((c, s.factors) for c, s in self.terms)})"

    def adjoint(self) -> "PauliSum":
        return PauliSum(self.width, [(np.conj(c), s) for c, s in self.terms])

    def commutator(self, other: "PauliSum") -> "PauliSum":
        return (self @ other) - (other @ self)

    def anticommutator(self, other: "PauliSum") -> "PauliSum":
        return (self @ other) + (other @ self)

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return all(abs(c.imag) <= tol for c, _ in simplify(self).terms)

    def padded(self, width: int) -> "PauliSum":
        return PauliSum(width, [(c, s.padded(width)) for c, s in self.terms])

    def is_close(self, other: "PauliSum", tol: float = 1e-12) -> bool:
        diff = simplify(self - other, drop_tol=0.0)
        return all(abs(c) <= tol for c, _ in diff.terms)

    def to_dense_matrix(self, cap: int = DENSE_QUBIT_CAP) -> np.ndarray:
        return to_dense_matrix(self, cap)

    def render(self) -> str:
        return render(self)


def simplify(s: PauliSum, drop_tol: float = DROP_TOL) -> PauliSum:
    acc: dict[str, complex] = {}
    for c, p in s.terms:
        acc[p.factors] = acc.get(p.factors, 0j) + c
    kept = [(c, PauliString(f)) for f, c in sorted(acc.items()) if abs(c) > drop_tol]
    out = PauliSum.__new__(PauliSum)
    out.width = s.width
    out.terms = tuple(kept)
    return out


def to_dense_matrix(s: PauliSum, cap: int = DENSE_QUBIT_CAP) -> np.ndarray:
    if s.width > cap:
        raise ResourceError(f"{s.width} qubits exceeds dense cap {cap}")
    dim = 1 << s.width
    idx = np.arange(dim, dtype=np.int64)
    mat = np.zeros((dim, dim), dtype=np.complex128)
    for c, p in s.terms:
        x, z, yph = p.masks()
        signs = 1.0 - 2.0 * (np.bitwise_count(idx & z) & 1)
        mat[idx ^ x, idx] += c * yph * signs
    return mat


def render(s: PauliSum) -> str:
    """One line per term: ``coeff_re coeff_im factors``."""
    return "\n".join(f"{c.real!r} {c.imag!r} {p.factors}" for c, p in s.terms)


def parse_rendering(text: str) -> PauliSum:
    terms = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 're im factors', got {line!r}")
        terms.append((complex(float(parts[0]), float(parts[1])), PauliString(parts[2])))
    if not terms:
        raise ValueError("empty Pauli sum rendering has no width")
    return PauliSum(terms[0][1].width, terms)


def pauli_term(width: int, ops: dict[int, str], coeff: complex = 1.0) -> PauliSum:
    """Single-term sum from ``{qubit: factor}``."""
    return PauliSum(width, [(coeff, PauliString.from_sparse(width, ops))])
