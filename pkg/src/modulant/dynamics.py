"""Global dynamics of automata networks and closed acyclic modules.

Brute-force analysis enumerates all ``q**n`` configurations; the
fixed-parameter routine instead enumerates the ``q**(k*c)`` input sequences
of a closed acyclic module and checks which of them feed themselves back.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import (
    Configuration,
    Kernel,
    Module,
    all_configurations,
    as_vector,
    decode_one,
    depths,
    encode,
    format_config,
    update,
)
from .errors import CapExceeded, ValidationError, WiringError
from .wiring import Wiring, close, feedback

STATE_CAP = 2 ** 26
SEQUENCE_CAP = 2 ** 24
MATERIALIZE_CAP = 2 ** 16
CHUNK = 2 ** 16


@dataclass(frozen=True)
class Attractor:
    """A cycle of the dynamics, rotated to start at its least configuration."""

    configs: tuple[Configuration, ...]

    @classmethod
    def from_cycle(cls, cycle: Sequence[Sequence[int]]) -> "Attractor":
        cycle = [tuple(int(v) for v in x) for x in cycle]
        if not cycle:
            raise ValidationError("an attractor has at least one configuration")
        if len(set(cycle)) != len(cycle):
            raise ValidationError("attractor configurations must be distinct")
        start = cycle.index(min(cycle))
        return cls(tuple(cycle[start:] + cycle[:start]))

    @property
    def size(self) -> int:
        return len(self.configs)

    def strings(self) -> list[str]:
        return [format_config(x) for x in self.configs]

    def sort_key(self):
        return (self.size, self.configs[0])

    def __str__(self):
        return "{" + ", ".join(self.strings()) + "}"


def _require_network(an: Module):
    if an.inputs:
        raise ValidationError(
            f"dynamics need an automata network; inputs {list(an.inputs)} are unwired"
        )


class DynamicsGraph:
    """Functional digraph ``x -> F(x)`` of an automata network."""

    def __init__(self, an: Module, mode: str | None = None):
        _require_network(an)
        self.network = an
        self.kernel = Kernel(an, mode)

    @property
    def size(self) -> int:
        return self.network.q ** self.network.n

    def successor(self, x) -> Configuration:
        return update(self.network, x)

    def successor_codes(self, cap: int = STATE_CAP, threads: int = 1) -> np.ndarray:
        """``codes[c]`` is the code of ``F`` applied to configuration code ``c``."""
        total = self.size
        if total > cap:
            raise CapExceeded(f"{total} configurations exceed enumeration cap {cap}")
        q, n = self.network.q, self.network.n

        def chunk(start):
            X = all_configurations(n, q, start, min(start + CHUNK, total))
            return encode(self.kernel.step(X), q)

        starts = range(0, total, CHUNK)
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                parts = list(pool.map(chunk, starts))
        else:
            parts = [chunk(s) for s in starts]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def edges(self, cap: int = MATERIALIZE_CAP) -> list[tuple[str, str]]:
        succ = self.successor_codes(cap)
        n, q = self.network.n, self.network.q
        return [(format_config(decode_one(c, n, q)), format_config(decode_one(int(d), n, q)))
                for c, d in enumerate(succ)]


def dynamics_graph(an: Module, mode: str | None = None) -> DynamicsGraph:
    return DynamicsGraph(an, mode)


def _cycles(succ: list[int]) -> list[list[int]]:
    color = [0] * len(succ)
    cycles = []
    for s in range(len(succ)):
        if color[s]:
            continue
        stamp = s + 1
        v = s
        while not color[v]:
            color[v] = stamp
            v = succ[v]
        if color[v] == stamp:
            cycle = [v]
            u = succ[v]
            while u != v:
                cycle.append(u)
                u = succ[u]
            cycles.append(cycle)
    return cycles


def attractors(an: Module, cap: int = STATE_CAP, threads: int = 1,
               mode: str | None = None) -> list[Attractor]:
    """All attractors, sorted by size then least configuration."""
    graph = DynamicsGraph(an, mode)
    succ = graph.successor_codes(cap, threads).tolist()
    n, q = an.n, an.q
    found = [Attractor.from_cycle([decode_one(c, n, q) for c in cyc]) for cyc in _cycles(succ)]
    return sorted(found, key=Attractor.sort_key)


def count_attractors_by_size(an: Module, cap: int = STATE_CAP, threads: int = 1) -> dict[int, int]:
    graph = DynamicsGraph(an)
    succ = graph.successor_codes(cap, threads).tolist()
    return dict(sorted(Counter(len(c) for c in _cycles(succ)).items()))


def fixed_points(an: Module, cap: int = STATE_CAP) -> list[Configuration]:
    return [a.configs[0] for a in attractors(an, cap) if a.size == 1]


# ---------------------------------------------------------------- FPT

@dataclass(frozen=True)
class FPTResult:
    found: bool
    witness: Attractor | None = None
    sequences: int = 0

    def __bool__(self):
        return self.found


def _decode_sequences(idx: np.ndarray, c: int, k: int, q: int) -> np.ndarray:
    """Sequence indices to a ``(B, c, k)`` digit array, position 0 most significant."""
    out = np.empty((idx.shape[0], c, k), dtype=np.uint8)
    width = c * k
    for t in range(c):
        for j in range(k):
            out[:, t, j] = (idx // q ** (width - 1 - (t * k + j))) % q
    return out


def attractor_exists_fpt(m: Module, w: Wiring, c: int, exact: bool = True,
                         horizon: int | None = None, cap: int = SEQUENCE_CAP,
                         threads: int = 1, mode: str | None = None) -> FPTResult:
    """Decide whether the closure of acyclic ``m`` under ``w`` has a size-``c`` attractor.

    Every input sequence ``J`` of length ``c`` is repeated long enough for
    the module to forget its start configuration, giving a configuration
    ``x = M(J…J)``; ``J`` is accepted when, fed cyclically for ``c`` more
    steps, the wired nodes reproduce ``J`` itself. With ``exact`` the cycle
    through ``x`` must have minimal period ``c``, otherwise any period
    dividing ``c`` is accepted.

    ``horizon`` is the number of updates after which the module no longer
    depends on its start configuration; it defaults to the longest node path
    of the interaction digraph.
    """
    if c < 1:
        raise ValidationError("attractor size must be at least 1")
    missing = [a for a in m.inputs if a not in w]
    if missing:
        raise WiringError(f"wiring is not total: unwired inputs {missing}")
    close(m, w)  # validates labels
    D = horizon if horizon is not None else max(depths(m, mode).values(), default=0)
    q, k, n = m.q, m.k, m.n
    total = q ** (k * c)
    if total > cap:
        raise CapExceeded(f"{total} input sequences exceed enumeration cap {cap}")
    kernel = Kernel(m, mode)
    node_pos = {s: j for j, s in enumerate(m.nodes)}
    wired = [node_pos[w[a]] for a in m.inputs]
    reps = -(-D // c)

    def chunk(start):
        idx = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        J = _decode_sequences(idx, c, k, q)
        X = np.zeros((idx.shape[0], n), dtype=np.uint8)
        for _ in range(reps):
            for t in range(c):
                X = kernel.step(X, J[:, t, :])
        states = [X]
        ok = np.ones(idx.shape[0], dtype=bool)
        for t in range(c):
            ok &= (states[-1][:, wired] == J[:, t, :]).all(axis=1)
            states.append(kernel.step(states[-1], J[:, t, :]))
        period = np.full(idx.shape[0], c, dtype=np.int64)
        for p in range(c - 1, 0, -1):
            if c % p == 0:
                same = (states[p] == states[0]).all(axis=1)
                period = np.where(same, p, period)
        accept = ok & (period == c) if exact else ok
        hits = np.flatnonzero(accept)
        if hits.size == 0:
            return None
        row = hits[0]
        p = int(period[row])
        return Attractor.from_cycle([tuple(states[t][row]) for t in range(p)])

    starts = list(range(0, total, CHUNK))
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            for witness in pool.map(chunk, starts):
                if witness is not None:
                    return FPTResult(True, witness, total)
    else:
        for s in starts:
            witness = chunk(s)
            if witness is not None:
                return FPTResult(True, witness, total)
    return FPTResult(False, None, total)


def fixed_point_exists(m: Module, w: Wiring, **kwargs) -> bool:
    """Whether the closure has a fixed point (``q**k`` candidate inputs)."""
    return attractor_exists_fpt(m, w, 1, exact=True, **kwargs).found


def brute_attractor_exists(m: Module, w: Wiring, c: int, exact: bool = True,
                           cap: int = STATE_CAP) -> bool:
    sizes = count_attractors_by_size(close(m, w), cap)
    if exact:
        return sizes.get(c, 0) > 0
    return any(size for size in sizes if c % size == 0)


# ---------------------------------------------------------------- bounds

@dataclass(frozen=True)
class BoundTable:
    q: int
    k: int
    c_max: int
    values: tuple[int, ...]

    def __getitem__(self, c: int) -> int:
        if not 1 <= c <= self.c_max:
            raise IndexError(f"size {c} outside 1..{self.c_max}")
        return self.values[c - 1]

    def as_dict(self) -> dict[int, int]:
        return {c: v for c, v in enumerate(self.values, 1)}


def bound_table(q: int, k: int, c_max: int) -> BoundTable:
    """Upper bounds on the number of size-``c`` attractors of a closed ``k``-input module."""
    if q < 2 or k < 0 or c_max < 1:
        raise ValidationError("need q >= 2, k >= 0 and c_max >= 1")
    values: list[int] = []
    for c in range(1, c_max + 1):
        values.append(q ** (k * c) - sum(values[d - 1] for d in range(1, c) if c % d == 0))
    return BoundTable(q, k, c_max, tuple(values))


# ---------------------------------------------------------------- equivalence tooling

def generated_input_sequence(m: Module, w: Wiring, x, length: int) -> tuple[tuple[int, ...], ...]:
    """Inputs read back from ``x, F(x), …, F^{length-1}(x)`` through ``w``."""
    F = close(m, w)
    y = as_vector(x, m.n, m.q)
    seq = []
    for _ in range(length):
        seq.append(feedback(m, w, y))
        y = update(F, y)
    return tuple(seq)


def attractors_isomorphic(A: Iterable[Attractor], B: Iterable[Attractor]) -> bool:
    """Disjoint unions of cycles are isomorphic iff their size multisets agree."""
    return Counter(a.size for a in A) == Counter(b.size for b in B)


def settle(an: Module, steps: int | None = None) -> np.ndarray:
    """Apply ``F`` ``steps`` times (default ``n``) to every configuration."""
    _require_network(an)
    steps = an.n if steps is None else steps
    total = an.q ** an.n
    if total > STATE_CAP:
        raise CapExceeded(f"{total} configurations exceed enumeration cap {STATE_CAP}")
    kernel = Kernel(an)
    X = all_configurations(an.n, an.q)
    for _ in range(steps):
        X = kernel.step(X)
    return X


def period_of(an: Module, x) -> int:
    """Minimal ``p`` with ``F^p(x) = x``; ``x`` must lie on an attractor."""
    x = as_vector(x, an.n, an.q)
    y = update(an, x)
    p = 1
    limit = an.q ** an.n
    while y != x:
        y = update(an, y)
        p += 1
        if p > limit:
            raise ValidationError(f"{format_config(x)} is not on an attractor")
    return p
