"""Excitation graph and the excitation-removal step.

Vertices ``0..m-1`` are the stabilizer generators (one per face and species),
vertex ``m`` is the boundary vertex ``w``.  An edge carries a local Pauli whose
syndrome is exactly its two endpoints (or exactly one endpoint for edges to
``w``).  Removal moves every excitation to ``w`` along a fixed shortest path,
so the removal operator is linear in the syndrome:
``R_U = sum_u P_u  (mod 2)``, which lets whole batches go through one GF(2)
matrix product.
"""
from __future__ import annotations

import collections
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import gf2
from .codes import COLOR, CodeLattice, validate
from .pauli import PauliOperator, batch_syndrome


@dataclass(frozen=True)
class Edge:
    u: int
    v: int  # v == boundary vertex for edges to w
    op: PauliOperator


def _op_key(op: PauliOperator):
    sup = tuple(op.support)
    return (len(sup), sup, tuple("IXZY".index(op[q]) for q in sup))


class ExcitationGraph:
    def __init__(self, lattice: CodeLattice, edges: list[Edge]):
        self.lattice = lattice
        self.num_excitation_vertices = len(lattice.stabilizers)
        self.boundary = self.num_excitation_vertices
        self.edges = tuple(edges)
        adj = collections.defaultdict(dict)
        for e in self.edges:
            adj[e.u][e.v] = e.op
            adj[e.v][e.u] = e.op
        self._adj = adj
        self.distance, self.predecessor = self._bfs(self.boundary)
        if (self.distance < 0).any():
            missing = np.nonzero(self.distance < 0)[0].tolist()
            raise RuntimeError(f"excitation vertices {missing} have no path to the boundary")
        n = lattice.n
        ops = np.zeros((self.num_excitation_vertices, 2 * n), dtype=np.uint8)
        for u in range(self.num_excitation_vertices):
            ops[u] = self._walk(u, self.predecessor)
        ops.setflags(write=False)
        self.path_ops = ops

    @property
    def num_vertices(self) -> int:
        return self.num_excitation_vertices + 1

    def neighbors(self, v: int) -> list[int]:
        return sorted(self._adj[v])

    def edge_operator(self, a: int, b: int) -> PauliOperator:
        return self._adj[a][b]

    def _bfs(self, source: int) -> tuple[np.ndarray, np.ndarray]:
        nv = self.num_vertices
        dist = np.full(nv, -1, dtype=np.int64)
        dist[source] = 0
        queue = collections.deque([source])
        while queue:
            u = queue.popleft()
            for v in self.neighbors(u):
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        pred = np.full(nv, -1, dtype=np.int64)
        for v in range(nv):
            if v != source and dist[v] > 0:
                pred[v] = min(u for u in self._adj[v] if dist[u] == dist[v] - 1)
        return dist, pred

    def _walk(self, start: int, pred: np.ndarray) -> np.ndarray:
        vec = np.zeros(2 * self.lattice.n, dtype=np.uint8)
        v = start
        while pred[v] >= 0:
            vec ^= self._adj[v][pred[v]].to_vector()
            v = pred[v]
        return vec

    def path_to_boundary(self, u: int) -> list[int]:
        path = [u]
        while path[-1] != self.boundary:
            path.append(int(self.predecessor[path[-1]]))
        return path

    @cached_property
    def all_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Shortest-path lengths and predecessor tables from every vertex."""
        nv = self.num_vertices
        dist = np.empty((nv, nv), dtype=np.int64)
        pred = np.empty((nv, nv), dtype=np.int64)
        for s in range(nv):
            dist[s], pred[s] = self._bfs(s)
        return dist, pred

    def pair_operator(self, a: int, b: int) -> np.ndarray:
        """Edge product along the canonical shortest path from ``a`` to ``b``."""
        return self._walk(a, self.all_pairs[1][b])


def build_graph(lattice: CodeLattice, check: bool = True) -> ExcitationGraph:
    """Excitation graph from all local Paulis with syndrome weight one or two.

    Color code: X-type or Z-type Paulis on one qubit or on the two ends of a
    lattice edge, so the two excitation species never share an edge.
    Toric code: single-qubit Paulis only.  When several operators connect the
    same pair of vertices the least one under (weight, support, Pauli codes) is
    kept.
    """
    if check:
        rep = validate(lattice, check_distance=False)
        if not rep.ok:
            raise ValueError(f"lattice failed validation: {rep.failures()}")
    n = lattice.n
    m = len(lattice.stabilizers)
    if lattice.code_kind == COLOR:
        cands = [PauliOperator.single(n, q, s) for q in range(n) for s in "XZ"]
        for a, b in lattice.edges:
            for s in "XZ":
                cands.append(PauliOperator.on(n, {a: s, b: s}))
    else:
        cands = [PauliOperator.single(n, q, s) for q in range(n) for s in "XZY"]
    vecs = np.array([c.to_vector() for c in cands], dtype=np.uint8)
    syn = batch_syndrome(vecs, lattice.stabilizers)
    best: dict[tuple[int, int], PauliOperator] = {}
    for op, s in zip(cands, syn):
        lit = np.nonzero(s)[0]
        if len(lit) == 1:
            pair = (int(lit[0]), m)
        elif len(lit) == 2:
            pair = (int(lit[0]), int(lit[1]))
        else:
            continue
        if pair not in best or _op_key(op) < _op_key(best[pair]):
            best[pair] = op
    edges = [Edge(u, v, op) for (u, v), op in sorted(best.items())]
    return ExcitationGraph(lattice, edges)


def excitations_from_syndrome(s, graph: ExcitationGraph) -> frozenset[int]:
    s = np.asarray(s)
    if s.ndim != 1 or s.size != graph.num_excitation_vertices:
        raise ValueError(f"syndrome length {s.size} does not match {graph.num_excitation_vertices} generators")
    return frozenset(int(i) for i in np.nonzero(s)[0])


def syndrome_from_excitations(U, graph: ExcitationGraph) -> np.ndarray:
    s = np.zeros(graph.num_excitation_vertices, dtype=np.uint8)
    for u in U:
        if not 0 <= u < graph.num_excitation_vertices:
            raise ValueError(f"vertex {u} is not an excitation vertex")
        s[u] = 1
    return s


def shortest_paths_to_boundary(graph: ExcitationGraph) -> tuple[np.ndarray, np.ndarray]:
    """(distance, predecessor) arrays of the BFS tree rooted at ``w``."""
    return graph.distance, graph.predecessor


def removal_operator(U, graph: ExcitationGraph) -> PauliOperator:
    vec = np.zeros(2 * graph.lattice.n, dtype=np.uint8)
    for u in U:
        if not 0 <= u < graph.num_excitation_vertices:
            raise ValueError(f"vertex {u} is not an excitation vertex")
        vec ^= graph.path_ops[u]
    return PauliOperator.from_vector(vec)


def batch_removal(syndromes: np.ndarray, graph: ExcitationGraph) -> np.ndarray:
    """Removal operators for a ``(B, m)`` syndrome array as ``(B, 2n)`` rows."""
    return gf2.matmul(np.atleast_2d(syndromes), graph.path_ops)


def dump_graph(graph: ExcitationGraph) -> str:
    lines = ["# topodec excitation graph v1",
             f"fingerprint {graph.lattice.fingerprint}",
             f"vertices {graph.num_vertices}",
             f"boundary {graph.boundary}",
             f"edges {len(graph.edges)}"]
    lines += [f"{e.u} {e.v} {e.op}" for e in graph.edges]
    lines.append("end")
    return "\n".join(lines) + "\n"
