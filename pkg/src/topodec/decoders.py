"""Decoders returning recovery operators for batches of syndromes.

Every decoder maps a ``(B, m)`` syndrome array to a ``(B, 2n)`` recovery array
whose syndromes equal the inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mlp
from .exgraph import ExcitationGraph, batch_removal
from .matching import boundary_matching
from .noise import BITPHASE, DEPOL, NoiseModel
from .pauli import LogicalClass, PauliOperator, batch_logical_class, batch_syndrome, class_operator


def class_table(graph: ExcitationGraph) -> np.ndarray:
    """Row c is the stored representative of logical class c as a ``[x|z]`` vector."""
    lat = graph.lattice
    return np.stack([class_operator(c, lat.logical_x, lat.logical_z).to_vector() for c in LogicalClass])


class Decoder:
    name = "decoder"

    def __init__(self, graph: ExcitationGraph):
        self.graph = graph

    def decode_batch(self, syndromes: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def decode(self, syndrome) -> PauliOperator:
        return PauliOperator.from_vector(self.decode_batch(np.asarray(syndrome)[None])[0])


class RemovalDecoder(Decoder):
    """Excitation removal alone (always predicts the trivial class)."""

    name = "removal"

    def decode_batch(self, syndromes):
        return batch_removal(syndromes, self.graph)


class ClassifierDecoder(Decoder):
    """Removal followed by a logical correction chosen per syndrome."""

    def __init__(self, graph: ExcitationGraph):
        super().__init__(graph)
        self.classes = class_table(graph)

    def predict_classes(self, syndromes: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def decode_batch(self, syndromes):
        syndromes = np.atleast_2d(syndromes)
        return batch_removal(syndromes, self.graph) ^ self.classes[self.predict_classes(syndromes)]


class NeuralDecoder(ClassifierDecoder):
    name = "neural"

    def __init__(self, graph: ExcitationGraph, network: mlp.Network, chunk: int = 20_000):
        if network.fingerprint and network.fingerprint != graph.lattice.fingerprint:
            raise ValueError(f"network was trained on lattice {network.fingerprint}, "
                             f"not {graph.lattice.fingerprint}")
        super().__init__(graph)
        self.network = network
        self.chunk = chunk

    def predict_classes(self, syndromes):
        parts = [mlp.predict(self.network, syndromes[s:s + self.chunk])[0]
                 for s in range(0, len(syndromes), self.chunk)]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


class MLDecoder(ClassifierDecoder):
    """Maximum-likelihood class per syndrome by enumerating every Pauli error.

    Feasible for small codes only (4^n errors); used as the d=3 reference.
    """

    name = "ml"

    def __init__(self, graph: ExcitationGraph, noise: NoiseModel):
        super().__init__(graph)
        lat = graph.lattice
        n = lat.n
        if n > 10:
            raise ValueError("exhaustive maximum likelihood is limited to 10 qubits")
        self.noise = noise
        prob = error_distribution(noise, lat)
        ids = np.arange(4 ** n, dtype=np.int64)
        vecs = ((ids[:, None] >> np.arange(2 * n)) & 1).astype(np.uint8)
        syn = batch_syndrome(vecs, lat.stabilizers)
        cls = batch_logical_class(batch_removal(syn, graph) ^ vecs, lat.logical_x, lat.logical_z)
        m = len(lat.stabilizers)
        key = syn.astype(np.int64) @ (1 << np.arange(m, dtype=np.int64))
        post = np.zeros((2 ** m, 4))
        np.add.at(post, (key, cls), prob)
        self.posterior = post
        self.table = np.argmax(post, axis=1)
        self._weights = 1 << np.arange(m, dtype=np.int64)

    def predict_classes(self, syndromes):
        return self.table[np.atleast_2d(syndromes).astype(np.int64) @ self._weights]


def error_distribution(noise: NoiseModel, lattice) -> np.ndarray:
    """Probability of every Pauli error, indexed by the integer with bits ``[x|z]``."""
    n = lattice.n
    size = 4 ** n
    dist = np.zeros(size)
    dist[0] = 1.0
    ids = np.arange(size, dtype=np.int64)

    def pattern(paulis: dict[int, int]) -> int:
        out = 0
        for q, c in paulis.items():  # c: 1=X 2=Z 3=Y
            if c & 1:
                out |= 1 << q
            if c & 2:
                out |= 1 << (n + q)
        return out

    p = noise.p
    if noise.kind in (BITPHASE, DEPOL):
        for q in range(n):
            if noise.kind == DEPOL:
                channel = [(1 - p, 0)] + [(p / 3, pattern({q: c})) for c in (1, 2, 3)]
            else:
                channel = [((1 - p) ** 2, 0), (p * (1 - p), pattern({q: 1})),
                           (p * (1 - p), pattern({q: 2})), (p * p, pattern({q: 3}))]
            dist = sum(w * dist[ids ^ pat] for w, pat in channel)
    else:
        for a, b in lattice.edges:
            new = (1 - p) * dist
            for code in range(1, 16):
                new += p / 15 * dist[ids ^ pattern({a: code & 3, b: code >> 2})]
            dist = new
    return dist


class MWPMDecoder(Decoder):
    """Minimum-weight perfect matching on the excitation graph (unit edge weights).

    ``backend='pymatching'`` runs sparse blossom on the graph itself;
    ``backend='blossom'`` builds the complete graph on the excitations with
    shortest-path weights plus boundary copies and solves it exactly in
    :mod:`topodec.matching`.
    """

    name = "mwpm"

    def __init__(self, graph: ExcitationGraph, backend: str = "pymatching"):
        super().__init__(graph)
        if graph.lattice.code_kind != "toric":
            raise ValueError("matching decoding is only provided for the toric code")
        if backend not in ("pymatching", "blossom"):
            raise ValueError(f"unknown matching backend {backend!r}")
        self.backend = backend
        if backend == "pymatching":
            self._matcher = _pymatching_graph(graph)

    def decode_batch(self, syndromes):
        syndromes = np.atleast_2d(syndromes).astype(np.uint8)
        if self.backend == "pymatching":
            return self._matcher.decode_batch(syndromes).astype(np.uint8)
        return np.stack([self._decode_one(s) for s in syndromes]) if len(syndromes) else \
            np.zeros((0, 2 * self.graph.lattice.n), dtype=np.uint8)

    def _decode_one(self, s: np.ndarray) -> np.ndarray:
        g = self.graph
        U = np.nonzero(s)[0]
        dist = g.all_pairs[0]
        out = np.zeros(2 * g.lattice.n, dtype=np.uint8)
        pairs = boundary_matching(dist[np.ix_(U, U)], dist[U, g.boundary])
        for a, b in pairs:
            out ^= g.path_ops[U[a]] if b < 0 else g.pair_operator(int(U[a]), int(U[b]))
        return out


def _pymatching_graph(graph: ExcitationGraph):
    import pymatching

    m = pymatching.Matching()
    for e in graph.edges:
        bits = set(np.nonzero(e.op.to_vector())[0].tolist())
        if e.v == graph.boundary:
            m.add_boundary_edge(e.u, fault_ids=bits, weight=1.0)
        else:
            m.add_edge(e.u, e.v, fault_ids=bits, weight=1.0)
    return m


@dataclass(frozen=True)
class DecodeOutcome:
    recovery: PauliOperator
    success: bool
    predicted_class: LogicalClass
    true_class: LogicalClass


def decode_error(decoder: Decoder, error: PauliOperator) -> DecodeOutcome:
    """Decode a single error and report the logical classes involved.

    Classes are measured relative to the excitation-removal operator, so
    ``predicted_class`` is the logical the decoder adds on top of removal.
    """
    g = decoder.graph
    lat = g.lattice
    e = error.to_vector()[None]
    s = batch_syndrome(e, lat.stabilizers)
    rec = decoder.decode_batch(s)
    base = batch_removal(s, g)
    true_cls = batch_logical_class(base ^ e, lat.logical_x, lat.logical_z)[0]
    pred_cls = batch_logical_class(base ^ rec, lat.logical_x, lat.logical_z)[0]
    return DecodeOutcome(PauliOperator.from_vector(rec[0]), bool(true_cls == pred_cls),
                         LogicalClass(int(pred_cls)), LogicalClass(int(true_cls)))
