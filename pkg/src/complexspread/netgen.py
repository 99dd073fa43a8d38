"""Regular lattices and their degree-preserving random rewirings.

A :class:`Network` stores its adjacency as an ``(n, k)`` integer array with
sorted rows, which is what the compiled diffusion kernels consume directly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import _kernels


class Kind(str, enum.Enum):
    RING = "ring"
    MOORE = "moore"
    HEX = "hex"
    REWIRED = "rewired"


@dataclass(frozen=True)
class Topology:
    kind: Kind
    base: Optional[Kind] = None
    swaps: int = 0

    @property
    def lattice(self) -> Kind:
        """The lattice this network was built from."""
        return self.base if self.kind is Kind.REWIRED else self.kind

    def tag(self) -> str:
        if self.kind is Kind.REWIRED:
            return f"rewired:{self.base.value}:{self.swaps}"
        return self.kind.value

    @classmethod
    def parse(cls, tag: str) -> "Topology":
        parts = tag.split(":")
        if parts[0] == Kind.REWIRED.value:
            if len(parts) != 3:
                raise ValueError(f"bad topology tag {tag!r}")
            return cls(Kind.REWIRED, Kind(parts[1]), int(parts[2]))
        return cls(Kind(parts[0]))


class NetworkError(ValueError):
    pass


class RewireExhausted(RuntimeError):
    """Raised when the proposal budget runs out before enough swaps stick."""


@dataclass(frozen=True, eq=False)
class Network:
    adjacency: np.ndarray
    topology: Topology = field(default_factory=lambda: Topology(Kind.RING))

    def __post_init__(self):
        adj = np.ascontiguousarray(self.adjacency, dtype=np.int64)
        if adj.ndim != 2:
            raise NetworkError("adjacency must be an (n, k) array")
        adj = np.sort(adj, axis=1)
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        self._validate()

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def k(self) -> int:
        return self.adjacency.shape[1]

    @property
    def n_edges(self) -> int:
        return self.n * self.k // 2

    def neighbors(self, v: int) -> np.ndarray:
        return self.adjacency[v]

    def edges(self) -> np.ndarray:
        """All edges as an ``(m, 2)`` array with ``u < v``, lexicographically sorted."""
        u = np.repeat(np.arange(self.n), self.k)
        v = self.adjacency.ravel()
        keep = u < v
        return np.column_stack([u[keep], v[keep]])

    def is_connected(self) -> bool:
        return bool(_kernels.is_connected(self.adjacency))

    def _validate(self) -> None:
        adj = self.adjacency
        n, k = adj.shape
        if n == 0 or k == 0:
            raise NetworkError("empty network")
        if adj.min() < 0 or adj.max() >= n:
            raise NetworkError("neighbour id out of range")
        rows = np.arange(n)[:, None]
        if np.any(adj == rows):
            raise NetworkError("self-loop")
        if k > 1 and np.any(adj[:, 1:] == adj[:, :-1]):
            raise NetworkError("duplicate edge")
        # symmetry: the directed pair multiset must equal its transpose
        fwd = rows.repeat(k, axis=1).ravel() * n + adj.ravel()
        back = adj.ravel() * n + rows.repeat(k, axis=1).ravel()
        if not np.array_equal(np.sort(fwd), np.sort(back)):
            raise NetworkError("adjacency is not symmetric")
        if not _kernels.is_connected(adj):
            raise NetworkError("network is disconnected")

    def same_edges(self, other: "Network") -> bool:
        return self.adjacency.shape == other.adjacency.shape and bool(
            np.array_equal(self.adjacency, other.adjacency)
        )

    def __repr__(self) -> str:
        return f"Network(n={self.n}, k={self.k}, topology={self.topology.tag()!r})"


def build_ring_lattice(n: int, k: int) -> Network:
    """Ring where node ``v`` links to ``v +- 1 .. v +- k/2`` (mod n)."""
    if k < 2 or k % 2:
        raise NetworkError(f"ring degree must be even and >= 2, got k={k}")
    if n <= k:
        raise NetworkError(f"ring needs n > k, got n={n}, k={k}")
    offsets = np.concatenate([np.arange(1, k // 2 + 1), -np.arange(1, k // 2 + 1)])
    adj = (np.arange(n)[:, None] + offsets[None, :]) % n
    return Network(adj, Topology(Kind.RING))


def _torus(rows: int, cols: int, steps) -> np.ndarray:
    r, c = np.divmod(np.arange(rows * cols), cols)
    cols_out = [((r + dr) % rows) * cols + (c + dc) % cols for dr, dc in steps]
    return np.column_stack(cols_out)


def build_moore_lattice(rows: int, cols: int) -> Network:
    """Torus grid, each node joined to its 8 surrounding cells."""
    if rows < 3 or cols < 3:
        raise NetworkError("Moore lattice needs rows >= 3 and cols >= 3")
    steps = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)]
    return Network(_torus(rows, cols, steps), Topology(Kind.MOORE))


def build_hex_lattice(rows: int, cols: int) -> Network:
    """Triangular torus (every node has 6 neighbours).

    Neighbours are the four grid neighbours plus the ``(+1, +1)`` and
    ``(-1, -1)`` diagonals.
    """
    if rows < 3 or cols < 3:
        raise NetworkError("hex lattice needs rows >= 3 and cols >= 3")
    steps = [(0, 1), (0, -1), (1, 0), (-1, 0), (1, 1), (-1, -1)]
    return Network(_torus(rows, cols, steps), Topology(Kind.HEX))


def build_lattice(kind: Kind | str, *, n: int | None = None, k: int | None = None,
                  rows: int | None = None, cols: int | None = None) -> Network:
    kind = Kind(kind)
    if kind is Kind.RING:
        if n is None or k is None:
            raise NetworkError("ring lattice needs n and k")
        return build_ring_lattice(n, k)
    if rows is None or cols is None:
        raise NetworkError(f"{kind.value} lattice needs rows and cols")
    if kind is Kind.MOORE:
        return build_moore_lattice(rows, cols)
    if kind is Kind.HEX:
        return build_hex_lattice(rows, cols)
    raise NetworkError(f"cannot build a {kind.value} lattice directly")


def rewire(net: Network, swaps: int, rng: np.random.Generator, check_interval: int = 3,
           max_attempts: int | None = None) -> Network:
    """Apply ``swaps`` connected double edge swaps and return the new network.

    Edges ``(u, v), (x, y)`` become ``(u, x), (v, y)``; proposals that would
    create a self-loop or an existing edge are rejected. Connectivity is
    checked after every ``check_interval`` accepted swaps and the whole
    window is reverted if it broke the graph. By default the proposal
    budget is ``100 * swaps``.
    """
    if swaps < 0:
        raise ValueError("swaps must be >= 0")
    if check_interval < 1:
        raise ValueError("check_interval must be >= 1")
    if swaps == 0:
        return net
    if max_attempts is None:
        max_attempts = 100 * swaps
    adj = np.array(net.adjacency, dtype=np.int64)
    edges = net.edges().astype(np.int64)
    kept, attempts, done = _kernels.rewire_kernel(adj, edges, swaps, check_interval,
                                                  max_attempts, rng)
    if not done:
        raise RewireExhausted(f"only {kept} of {swaps} swaps kept after {attempts} proposals")
    base = net.topology.lattice
    prior = net.topology.swaps if net.topology.kind is Kind.REWIRED else 0
    return Network(adj, Topology(Kind.REWIRED, base, prior + swaps))


def swaps_for_fraction(net: Network, fraction: float) -> int:
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"rewire fraction must be in [0, 1], got {fraction}")
    return int(round(fraction * net.n_edges))


def rewire_fraction(net: Network, fraction: float, rng: np.random.Generator) -> Network:
    return rewire(net, swaps_for_fraction(net, fraction), rng)


# ---------------------------------------------------------------------------
# edge-list text format: "n k topology" header, then "u v" per line, u < v
# ---------------------------------------------------------------------------

def write_edge_list(net: Network, path: str | Path) -> None:
    lines = [f"{net.n} {net.k} {net.topology.tag()}"]
    lines.extend(f"{u} {v}" for u, v in net.edges())
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path: str | Path) -> Network:
    text = Path(path).read_text().split("\n")
    header = text[0].split()
    if len(header) != 3:
        raise NetworkError("edge list header must be 'n k topology'")
    n, k, topology = int(header[0]), int(header[1]), Topology.parse(header[2])
    pairs = np.array([line.split() for line in text[1:] if line.strip()], dtype=np.int64)
    if pairs.shape != (n * k // 2, 2):
        raise NetworkError(f"expected {n * k // 2} edges, found {len(pairs)}")
    if np.any(pairs[:, 0] >= pairs[:, 1]):
        raise NetworkError("edges must be written with u < v")
    degree = np.bincount(pairs.ravel(), minlength=n)
    if degree.shape[0] != n or np.any(degree != k):
        raise NetworkError("edge list is not k-regular")
    order = np.argsort(np.concatenate([pairs[:, 0], pairs[:, 1]]), kind="stable")
    nbrs = np.concatenate([pairs[:, 1], pairs[:, 0]])[order]
    return Network(nbrs.reshape(n, k), topology)
