"""Configuration <-> basis-index maps.

Layout convention: registers are laid out item-major (vertex, city, job) and
value-minor (color, slot, time).  Inside a binary register the least
significant bit comes first.  Qubit ``q`` is bit ``q`` of the basis index.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .problems import Problem, packed_starts

FEASIBLE_CAP = 10**6


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class Register:
    """A contiguous group of qubits holding one variable."""

    scheme: str  # "bit", "onehot" or "binary"
    qubits: tuple[int, ...]
    labels: tuple[int, ...] = ()  # value carried by each one-hot qubit


class Encoding:
    scheme: str = ""
    n_qubits: int = 0
    registers: tuple[Register, ...] = ()

    def encode(self, cfg) -> int:
        raise NotImplementedError

    def decode(self, index: int):
        raise NotImplementedError

    def onehot_registers(self) -> list[Register]:
        return [r for r in self.registers if r.scheme == "onehot"]

    def _check_index(self, index: int) -> int:
        index = int(index)
        if not 0 <= index < 1 << self.n_qubits:
            raise EncodingError(f"index {index} outside 2^{self.n_qubits}")
        return index


def _read_onehot(index: int, reg: Register):
    hot = [k for k, q in enumerate(reg.qubits) if (index >> q) & 1]
    return reg.labels[hot[0]] if len(hot) == 1 else None


class BitEncoding(Encoding):
    scheme = "bit"

    def __init__(self, n: int):
        self.n_qubits = n
        self.registers = tuple(Register("bit", (q,)) for q in range(n))

    def encode(self, cfg):
        cfg = tuple(cfg)
        if len(cfg) != self.n_qubits or any(b not in (0, 1) for b in cfg):
            raise EncodingError(f"expected {self.n_qubits} bits, got {cfg}")
        return sum(int(b) << q for q, b in enumerate(cfg))

    def decode(self, index):
        index = self._check_index(index)
        return tuple((index >> q) & 1 for q in range(self.n_qubits))


class OneHotEncoding(Encoding):
    """``n_registers`` variables over ``[d]``, ``d`` qubits each; qubit ``v*d + a``."""

    scheme = "onehot"

    def __init__(self, d: int, n_registers: int):
        if d < 1:
            raise EncodingError("d must be positive")
        self.d = d
        self.n_registers = n_registers
        self.n_qubits = d * n_registers
        self.registers = tuple(
            Register("onehot", tuple(range(v * d, v * d + d)), tuple(range(d))) for v in range(n_registers)
        )

    def qubit(self, v: int, a: int) -> int:
        return v * self.d + a

    def encode(self, cfg):
        cfg = tuple(cfg)
        if len(cfg) != self.n_registers:
            raise EncodingError(f"expected {self.n_registers} values, got {len(cfg)}")
        out = 0
        for v, a in enumerate(cfg):
            if not 0 <= a < self.d:
                raise EncodingError(f"value {a} outside [0, {self.d})")
            out |= 1 << self.qubit(v, a)
        return out

    def decode(self, index):
        index = self._check_index(index)
        vals = []
        for reg in self.registers:
            a = _read_onehot(index, reg)
            if a is None:
                return None
            vals.append(a)
        return tuple(vals)


class BinaryEncoding(Encoding):
    """``ceil(log2 d)`` qubits per variable, least significant bit first."""

    scheme = "binary"

    def __init__(self, d: int, n_registers: int):
        if d < 2:
            raise EncodingError("binary encoding needs d >= 2")
        self.d = d
        self.l = math.ceil(math.log2(d))
        self.n_registers = n_registers
        self.n_qubits = self.l * n_registers
        self.registers = tuple(Register("binary", tuple(range(v * self.l, (v + 1) * self.l))) for v in range(n_registers))

    def qubit(self, v: int, bit: int) -> int:
        return v * self.l + bit

    def encode(self, cfg):
        cfg = tuple(cfg)
        if len(cfg) != self.n_registers:
            raise EncodingError(f"expected {self.n_registers} values")
        out = 0
        for v, a in enumerate(cfg):
            if not 0 <= a < self.d:
                raise EncodingError(f"value {a} outside [0, {self.d})")
            out |= int(a) << (v * self.l)
        return out

    def decode(self, index):
        index = self._check_index(index)
        mask = (1 << self.l) - 1
        vals = tuple((index >> (v * self.l)) & mask for v in range(self.n_registers))
        return None if any(a >= self.d for a in vals) else vals


class SlackEncoding(Encoding):
    """Unconstrained binary registers of individual widths (slack variables)."""

    scheme = "binary"

    def __init__(self, widths: Sequence[int]):
        self.widths = tuple(int(w) for w in widths)
        offs = [0]
        for w in self.widths:
            offs.append(offs[-1] + w)
        self.offsets = tuple(offs[:-1])
        self.n_qubits = offs[-1]
        self.registers = tuple(
            Register("binary", tuple(range(o, o + w))) for o, w in zip(self.offsets, self.widths)
        )

    def encode(self, cfg):
        cfg = tuple(cfg)
        if len(cfg) != len(self.widths):
            raise EncodingError("slack length mismatch")
        out = 0
        for y, o, w in zip(cfg, self.offsets, self.widths):
            if not 0 <= y < 1 << w:
                raise EncodingError(f"slack {y} does not fit {w} bits")
            out |= int(y) << o
        return out

    def decode(self, index):
        index = self._check_index(index)
        return tuple((index >> o) & ((1 << w) - 1) for o, w in zip(self.offsets, self.widths))


class DirectOneHotEncoding(Encoding):
    """Orderings as permutation matrices: qubit ``(u, i)`` set iff item u is at slot i.

    With ``fixed_first`` item 0 is pinned to slot 0 and only items/slots
    ``1..n-1`` get qubits.
    """

    scheme = "direct-onehot"

    def __init__(self, n: int, fixed_first: bool = False):
        self.n = n
        self.fixed_first = fixed_first
        self.free = n - 1 if fixed_first else n
        self.offset = 1 if fixed_first else 0
        self.n_qubits = self.free * self.free
        f = self.free
        self.registers = tuple(
            Register("onehot", tuple(range(u * f, u * f + f)), tuple(range(self.offset, n))) for u in range(f)
        )

    def qubit(self, u: int, i: int) -> int:
        return (u - self.offset) * self.free + (i - self.offset)

    def encode(self, cfg):
        iota = tuple(int(a) for a in cfg)
        if sorted(iota) != list(range(self.n)):
            raise EncodingError(f"{iota} is not a permutation of 0..{self.n - 1}")
        if self.fixed_first and iota[0] != 0:
            raise EncodingError("item 0 must sit at slot 0")
        out = 0
        for i in range(self.offset, self.n):
            out |= 1 << self.qubit(iota[i], i)
        return out

    def decode(self, index):
        index = self._check_index(index)
        slot_of = {}
        for u in range(self.offset, self.n):
            i = _read_onehot(index, self.registers[u - self.offset])
            if i is None:
                return None
            slot_of[u] = i
        if len(set(slot_of.values())) != len(slot_of):
            return None
        iota = [0] * self.n
        for u, i in slot_of.items():
            iota[i] = u
        return tuple(iota)


class WindowOneHotEncoding(Encoding):
    """One register per job over its list of admissible time labels; configs are start times."""

    scheme = "absolute-onehot"

    def __init__(self, slots: Sequence[Sequence[int]]):
        self.slots = tuple(tuple(int(t) for t in s) for s in slots)
        regs = []
        q = 0
        for s in self.slots:
            regs.append(Register("onehot", tuple(range(q, q + len(s))), s))
            q += len(s)
        self.registers = tuple(regs)
        self.n_qubits = q
        self._pos = tuple({t: k for k, t in enumerate(s)} for s in self.slots)

    def qubit(self, j: int, t: int) -> int:
        return self.registers[j].qubits[self._pos[j][t]]

    def encode_schedule(self, s) -> int:
        s = tuple(int(t) for t in s)
        if len(s) != len(self.slots):
            raise EncodingError("schedule length mismatch")
        out = 0
        for j, t in enumerate(s):
            if t not in self._pos[j]:
                raise EncodingError(f"time {t} outside job {j}'s slots")
            out |= 1 << self.qubit(j, t)
        return out

    def decode_schedule(self, index):
        index = self._check_index(index)
        s = []
        for reg in self.registers:
            t = _read_onehot(index, reg)
            if t is None:
                return None
            s.append(t)
        return tuple(s)

    encode = encode_schedule
    decode = decode_schedule


class AbsoluteOneHotEncoding(WindowOneHotEncoding):
    """Orderings through the start times of the packed schedule, windows ``[0, h - p_j]``."""

    def __init__(self, p: Sequence[int], horizon: int | None = None):
        self.p = tuple(int(a) for a in p)
        self.horizon = sum(self.p) if horizon is None else int(horizon)
        super().__init__([range(0, self.horizon - pj + 1) for pj in self.p])

    def encode(self, cfg):
        return self.encode_schedule(packed_starts(tuple(cfg), self.p))

    def decode(self, index):
        s = self.decode_schedule(index)
        if s is None:
            return None
        order = tuple(sorted(range(len(s)), key=lambda j: s[j]))
        return order if packed_starts(order, self.p) == s else None


class ProductEncoding(Encoding):
    """Concatenation of encodings; configurations are tuples of part configurations."""

    scheme = "product"

    def __init__(self, parts: Sequence[Encoding]):
        self.parts = tuple(parts)
        self.offsets = []
        q = 0
        regs = []
        for e in self.parts:
            self.offsets.append(q)
            regs += [Register(r.scheme, tuple(x + q for x in r.qubits), r.labels) for r in e.registers]
            q += e.n_qubits
        self.n_qubits = q
        self.registers = tuple(regs)

    def encode(self, cfg):
        cfg = tuple(cfg)
        if len(cfg) != len(self.parts):
            raise EncodingError("product configuration arity mismatch")
        return sum(e.encode(c) << o for e, c, o in zip(self.parts, cfg, self.offsets))

    def decode(self, index):
        index = self._check_index(index)
        out = []
        for e, o in zip(self.parts, self.offsets):
            c = e.decode((index >> o) & ((1 << e.n_qubits) - 1))
            if c is None:
                return None
            out.append(c)
        return tuple(out)


def encode(cfg, enc: Encoding) -> int:
    return enc.encode(cfg)


def decode(index: int, enc: Encoding):
    return enc.decode(index)


def enumerate_feasible(problem: Problem, enc: Encoding, cap: int = FEASIBLE_CAP) -> list[int]:
    """Sorted basis indices of the feasible configurations."""
    out = set()
    for cfg in problem.configurations():
        if problem._feasible(cfg):
            out.add(enc.encode(cfg))
            if len(out) > cap:
                raise EncodingError(f"feasible set exceeds {cap}")
    return sorted(out)
