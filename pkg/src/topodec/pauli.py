"""Phase-free Pauli algebra in the binary symplectic representation.

A Pauli operator on ``n`` qubits is stored as two ``n``-bit integers (the X and
Z parts), so products are XORs and commutation is a popcount parity.  Batches
of operators used by the Monte Carlo code are ``(B, 2n)`` uint8 arrays laid out
as ``[x | z]``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np

from . import gf2

_CHARS = "IXZY"  # index = x + 2 z


class LogicalClass(IntEnum):
    """Logical coset label for one encoded qubit."""

    I = 0
    X = 1
    Y = 2
    Z = 3

    @property
    def bits(self) -> tuple[int, int]:
        return _CLASS_BITS[self]

    @classmethod
    def from_bits(cls, x: int, z: int) -> "LogicalClass":
        return _BITS_CLASS[(x & 1, z & 1)]

    def __mul__(self, other: "LogicalClass") -> "LogicalClass":  # type: ignore[override]
        if not isinstance(other, LogicalClass):
            return NotImplemented
        ax, az = self.bits
        bx, bz = other.bits
        return LogicalClass.from_bits(ax ^ bx, az ^ bz)


_CLASS_BITS = {
    LogicalClass.I: (0, 0),
    LogicalClass.X: (1, 0),
    LogicalClass.Y: (1, 1),
    LogicalClass.Z: (0, 1),
}
_BITS_CLASS = {v: k for k, v in _CLASS_BITS.items()}

# class index from (anticommutes-with-logical-z, anticommutes-with-logical-x)
CLASS_TABLE = np.array([[0, 3], [1, 2]], dtype=np.int64)


def _bits_to_int(bits: Iterable[int]) -> int:
    out = 0
    for i, b in enumerate(bits):
        if b:
            out |= 1 << i
    return out


def _int_to_bits(value: int, n: int) -> np.ndarray:
    raw = np.frombuffer(value.to_bytes((n + 7) // 8 or 1, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].copy()


@dataclass(frozen=True)
class PauliOperator:
    """n-qubit Pauli operator modulo phase."""

    n: int
    x: int = 0
    z: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("qubit count must be non-negative")
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask or self.x < 0 or self.z < 0:
            raise ValueError("bit pattern exceeds qubit count")

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n)

    @classmethod
    def from_bits(cls, x_bits: Sequence[int], z_bits: Sequence[int]) -> "PauliOperator":
        if len(x_bits) != len(z_bits):
            raise ValueError("x_bits and z_bits must have the same length")
        return cls(len(x_bits), _bits_to_int(x_bits), _bits_to_int(z_bits))

    @classmethod
    def from_vector(cls, vec: Sequence[int]) -> "PauliOperator":
        vec = np.asarray(vec)
        if vec.ndim != 1 or vec.size % 2:
            raise ValueError("symplectic vector must have even length")
        n = vec.size // 2
        return cls.from_bits(vec[:n], vec[n:])

    @classmethod
    def from_string(cls, s: str) -> "PauliOperator":
        x = z = 0
        for i, ch in enumerate(s.upper()):
            try:
                k = _CHARS.index(ch)
            except ValueError:
                raise ValueError(f"invalid Pauli character {ch!r}") from None
            if k & 1:
                x |= 1 << i
            if k & 2:
                z |= 1 << i
        return cls(len(s), x, z)

    @classmethod
    def single(cls, n: int, qubit: int, pauli: str) -> "PauliOperator":
        return cls.on(n, {qubit: pauli})

    @classmethod
    def on(cls, n: int, paulis: dict[int, str]) -> "PauliOperator":
        x = z = 0
        for q, ch in paulis.items():
            k = _CHARS.index(ch)
            if k & 1:
                x |= 1 << q
            if k & 2:
                z |= 1 << q
        return cls(n, x, z)

    @property
    def x_bits(self) -> np.ndarray:
        return _int_to_bits(self.x, self.n)

    @property
    def z_bits(self) -> np.ndarray:
        return _int_to_bits(self.z, self.n)

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.x_bits, self.z_bits])

    def __str__(self) -> str:
        return "".join(_CHARS[((self.x >> i) & 1) | (((self.z >> i) & 1) << 1)] for i in range(self.n))

    def __getitem__(self, qubit: int) -> str:
        return _CHARS[((self.x >> qubit) & 1) | (((self.z >> qubit) & 1) << 1)]

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def support(self) -> list[int]:
        s = self.x | self.z
        return [i for i in range(self.n) if (s >> i) & 1]

    def is_identity(self) -> bool:
        return not (self.x or self.z)

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        return multiply(self, other)


def _check_sizes(a: PauliOperator, b: PauliOperator) -> None:
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} vs {b.n}")


def multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    """Phase-free product."""
    _check_sizes(a, b)
    return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z)


def product(ops: Iterable[PauliOperator], n: int) -> PauliOperator:
    x = z = 0
    for op in ops:
        if op.n != n:
            raise ValueError(f"qubit count mismatch: {op.n} vs {n}")
        x ^= op.x
        z ^= op.z
    return PauliOperator(n, x, z)


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    _check_sizes(a, b)
    return ((a.x & b.z) ^ (a.z & b.x)).bit_count() % 2 == 0


class StabilizerGroup:
    """Ordered list of stabilizer generators; generator index = syndrome bit."""

    def __init__(self, generators: Sequence[PauliOperator]):
        gens = tuple(generators)
        if not gens:
            raise ValueError("stabilizer group needs at least one generator")
        n = gens[0].n
        if any(g.n != n for g in gens):
            raise ValueError("generators act on different qubit counts")
        self.generators = gens
        self.n = n
        self.matrix = np.array([g.to_vector() for g in gens], dtype=np.uint8)
        self.matrix.setflags(write=False)
        # syndrome = [x|z] @ parity.T with the symplectic swap folded in
        self.parity = np.concatenate([self.matrix[:, n:], self.matrix[:, :n]], axis=1)
        self.parity.setflags(write=False)

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, i: int) -> PauliOperator:
        return self.generators[i]

    def pairwise_commuting(self) -> bool:
        return not gf2.matmul(self.matrix, self.parity.T).any()

    def rank(self) -> int:
        return gf2.rank(self.matrix)

    def is_independent(self) -> bool:
        return self.rank() == len(self)

    def contains(self, op: PauliOperator) -> bool:
        return gf2.in_rowspace(self.matrix, op.to_vector())


def syndrome(err: PauliOperator, group: StabilizerGroup) -> np.ndarray:
    """Bit g is 1 iff ``err`` anticommutes with generator g."""
    if err.n != group.n:
        raise ValueError(f"qubit count mismatch: {err.n} vs {group.n}")
    return np.array([0 if commutes(err, g) else 1 for g in group.generators], dtype=np.uint8)


def batch_syndrome(errors: np.ndarray, group: StabilizerGroup) -> np.ndarray:
    """Syndromes for a ``(B, 2n)`` array of errors."""
    errors = np.atleast_2d(errors)
    if errors.shape[1] != 2 * group.n:
        raise ValueError(f"expected {2 * group.n} columns, got {errors.shape[1]}")
    return gf2.matmul(errors, group.parity.T)


def symplectic_form(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise symplectic products of row sets ``a`` (A, 2n) and ``b`` (B, 2n)."""
    n = a.shape[-1] // 2
    b_swapped = np.concatenate([b[..., n:], b[..., :n]], axis=-1)
    return gf2.matmul(a, b_swapped.T)


def logical_class(residual: PauliOperator, logical_x: PauliOperator, logical_z: PauliOperator,
                  group: StabilizerGroup | None = None) -> LogicalClass:
    """Coset label of a zero-syndrome operator.

    Passing ``group`` enables the zero-syndrome precondition check.
    """
    if group is not None and syndrome(residual, group).any():
        raise ValueError("residual has a nonzero syndrome; its logical class is undefined")
    has_x = not commutes(residual, logical_z)
    has_z = not commutes(residual, logical_x)
    return LogicalClass(CLASS_TABLE[int(has_x), int(has_z)])


def batch_logical_class(residuals: np.ndarray, logical_x: PauliOperator,
                        logical_z: PauliOperator) -> np.ndarray:
    """Class indices (0..3 = I, X, Y, Z) for a ``(B, 2n)`` array of residuals."""
    refs = np.stack([logical_z.to_vector(), logical_x.to_vector()])
    anti = symplectic_form(np.atleast_2d(residuals), refs)
    return CLASS_TABLE[anti[:, 0], anti[:, 1]]


def class_operator(cls: LogicalClass | int, logical_x: PauliOperator,
                   logical_z: PauliOperator) -> PauliOperator:
    """Representative of a logical class built from the stored logicals."""
    x, z = LogicalClass(int(cls)).bits
    op = PauliOperator.identity(logical_x.n)
    if x:
        op = op * logical_x
    if z:
        op = op * logical_z
    return op
