"""Triangular color code and triangular toric code with a twist.

Both codes live on the same qubits: the vertices of a triangular patch of the
hexagonal lattice.  Positions are stored in axial coordinates ``(i, j)`` of the
underlying triangular grid with ``0 <= i, j`` and ``i + j <= L`` where
``L = 3 (d - 1) / 2``.  Grid points with ``(i - j) % 3 == 1`` are face centres,
every other point is a qubit.  Qubits are enumerated row by row from the
bottom-left corner, left to right and bottom to top.

The toric code is obtained from the color code lattice by splitting every
hexagon into two squares along one of its long diagonals.  The diagonal
direction depends on which of the three sectors around the centroid the
hexagon lies in, so the resulting square lattice has a single 3-valent bulk
vertex (the twist) at the centroid.  The checkerboard colouring is cut along
the shortest lattice path from the twist to the bottom boundary; faces on one
side of that path act with X and Z exchanged on the path qubits, which makes
them the mixed stabilizers of the defect line.
"""
from __future__ import annotations

import collections
import hashlib
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import gf2
from .pauli import PauliOperator, StabilizerGroup, commutes, symplectic_form

COLOR = "color"
TORIC = "toric"
CODE_KINDS = (COLOR, TORIC)
COLOR_NAMES = ("red", "green", "blue")

# axial neighbour offsets in cyclic order around a face centre
_DIRS = ((1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1))
_SWAP = {"X": "Z", "Z": "X", "Y": "Y"}


@dataclass(frozen=True)
class Face:
    id: int
    qubits: tuple[int, ...]  # cyclic order
    color: str
    stabilizers: tuple[int, ...]

    def edges(self) -> list[tuple[int, int]]:
        q = self.qubits
        if len(q) == 2:
            return [tuple(sorted(q))]
        return [tuple(sorted((q[k], q[(k + 1) % len(q)]))) for k in range(len(q))]


@dataclass(frozen=True)
class BoundarySegment:
    label: str
    qubits: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class CodeLattice:
    code_kind: str
    distance: int
    coords: tuple[tuple[int, int], ...]
    faces: tuple[Face, ...]
    stabilizers: StabilizerGroup
    logical_x: PauliOperator
    logical_z: PauliOperator
    boundaries: tuple[BoundarySegment, ...]
    edges: tuple[tuple[int, int], ...]
    defect_line: tuple[int, ...] = ()
    twist: int | None = None

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def num_generators(self) -> int:
        return len(self.stabilizers)

    @property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.code_kind}|{self.distance}|".encode())
        for g in self.stabilizers:
            h.update(str(g).encode() + b"\n")
        return h.hexdigest()[:16]

    def neighbor_counts(self) -> np.ndarray:
        counts = np.zeros(self.n, dtype=np.int64)
        for a, b in self.edges:
            counts[a] += 1
            counts[b] += 1
        return counts

    @property
    def bulk_neighbor_count(self) -> int:
        return int(self.neighbor_counts().max())

    def cartesian(self) -> np.ndarray:
        return np.array([_cart(c) for c in self.coords])

    def __eq__(self, other):
        if not isinstance(other, CodeLattice):
            return NotImplemented
        return (self.code_kind == other.code_kind and self.distance == other.distance
                and self.coords == other.coords and self.faces == other.faces
                and self.stabilizers.generators == other.stabilizers.generators
                and self.logical_x == other.logical_x and self.logical_z == other.logical_z
                and self.boundaries == other.boundaries and self.edges == other.edges
                and self.defect_line == other.defect_line and self.twist == other.twist)

    __hash__ = object.__hash__


def _cart(p) -> tuple[float, float]:
    return (p[0] + p[1] / 2.0, p[1] * math.sqrt(3) / 2.0)


def _check_distance(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool):
        raise TypeError("distance must be an integer")
    if d < 3 or d % 2 == 0:
        raise ValueError(f"distance must be odd and >= 3, got {d}")


def qubit_count(d: int) -> int:
    return (3 * d * d + 1) // 4


class _Patch:
    """Shared geometry of the triangular patch."""

    def __init__(self, d: int):
        self.d = d
        self.L = 3 * (d - 1) // 2
        L = self.L
        pts = [(i, j) for j in range(L + 1) for i in range(L + 1 - j)]
        self.coords = [p for p in pts if (p[0] - p[1]) % 3 != 1]
        self.index = {p: k for k, p in enumerate(self.coords)}
        self.centres = [p for p in pts if (p[0] - p[1]) % 3 == 1]
        self.face_cycles = [self._cycle(c) for c in self.centres]

    def _cycle(self, c) -> list[tuple[int, int]]:
        ring = [(c[0] + a, c[1] + b) for a, b in _DIRS]
        present = [p in self.index for p in ring]
        if all(present):
            return ring
        # rotate so the missing arc sits at the end of the cycle
        start = next(k for k in range(6) if present[k] and not present[k - 1])
        return [ring[(start + t) % 6] for t in range(6) if present[(start + t) % 6]]

    def side_qubits(self) -> dict[str, list[int]]:
        L = self.L
        bottom = sorted((p for p in self.coords if p[1] == 0), key=lambda p: p[0])
        hyp = sorted((p for p in self.coords if p[0] + p[1] == L), key=lambda p: p[1])
        left = sorted((p for p in self.coords if p[0] == 0), key=lambda p: -p[1])
        return {name: [self.index[p] for p in side]
                for name, side in (("bottom", bottom), ("hypotenuse", hyp), ("left", left))}

    def on_boundary(self, p) -> bool:
        return p[0] == 0 or p[1] == 0 or p[0] + p[1] == self.L


def _edges_from_cycles(cycles) -> list[tuple[int, int]]:
    out = set()
    for cyc in cycles:
        if len(cyc) < 2:
            continue
        for k in range(len(cyc)):
            a, b = cyc[k], cyc[(k + 1) % len(cyc)]
            if a != b:
                out.add((min(a, b), max(a, b)))
    return sorted(out)


def _pauli_sort_key(op: PauliOperator):
    sup = tuple(op.support)
    return (sup, tuple("IXZY".index(op[q]) for q in sup))


def _side_logicals(group: StabilizerGroup, sides: dict[str, list[int]]) -> tuple[PauliOperator, PauliOperator]:
    """Canonical logical pair supported on single boundary sides.

    Candidates are the nontrivial logicals supported on exactly one full side.
    ``logical_x`` is the least candidate under (support, Pauli codes I<X<Z<Y);
    ``logical_z`` is the least candidate anticommuting with it.
    """
    n = group.n
    cands = []
    for qubits in sides.values():
        cols = list(qubits) + [n + q for q in qubits]
        sub = group.parity[:, cols]
        basis = gf2.nullspace(sub)
        for coeffs in itertools.product((0, 1), repeat=len(basis)):
            if not any(coeffs):
                continue
            v = np.zeros(len(cols), dtype=np.uint8)
            for c, row in zip(coeffs, basis):
                if c:
                    v ^= row
            full = np.zeros(2 * n, dtype=np.uint8)
            full[cols] = v
            op = PauliOperator.from_vector(full)
            if op.weight != len(qubits) or group.contains(op):
                continue
            cands.append(op)
    if not cands:
        raise RuntimeError("no boundary-supported logical operator found")
    cands.sort(key=_pauli_sort_key)
    lx = cands[0]
    lz = next((c for c in cands if not commutes(c, lx)), None)
    if lz is None:
        raise RuntimeError("no anticommuting logical partner found on the boundary")
    return lx, lz


@lru_cache(maxsize=None)
def build_color_code(d: int) -> CodeLattice:
    """Triangular 6.6.6 color code of odd distance ``d``."""
    _check_distance(d)
    patch = _Patch(d)
    n = len(patch.coords)
    nf = len(patch.centres)
    faces = []
    cycles = []
    for k, (c, cyc) in enumerate(zip(patch.centres, patch.face_cycles)):
        qs = tuple(patch.index[p] for p in cyc)
        cycles.append(qs)
        faces.append(Face(k, qs, COLOR_NAMES[c[0] % 3], (k, nf + k)))
    gens = [PauliOperator.on(n, {q: "X" for q in f.qubits}) for f in faces]
    gens += [PauliOperator.on(n, {q: "Z" for q in f.qubits}) for f in faces]
    group = StabilizerGroup(gens)

    sides = patch.side_qubits()
    boundaries = []
    for name, qubits in sides.items():
        touching = {f.color for f in faces if set(f.qubits) & set(qubits)}
        (label,) = set(COLOR_NAMES) - touching
        boundaries.append(BoundarySegment(label, tuple(qubits)))
    lx, lz = _side_logicals(group, sides)
    return CodeLattice(COLOR, d, tuple(patch.coords), tuple(faces), group, lx, lz,
                       tuple(boundaries), tuple(_edges_from_cycles(cycles)))


def _sector_class(c, L) -> int:
    # diagonal direction of a hexagon: which side of the triangle is nearest
    i, j = c
    return min((j, 0), (L - i - j, 1), (i, 2))[1]


@lru_cache(maxsize=None)
def build_twisted_toric_code(d: int) -> CodeLattice:
    """Triangular toric code with a twist, on the color code qubits."""
    _check_distance(d)
    patch = _Patch(d)
    L = patch.L
    n = len(patch.coords)
    idx = patch.index

    quads: list[list[tuple[int, int]]] = []
    for c, cyc in zip(patch.centres, patch.face_cycles):
        if len(cyc) == 4:
            quads.append(cyc)
            continue
        k = _sector_class(c, L)
        quads.append([cyc[(k + t) % 6] for t in range(4)])
        quads.append([cyc[(k + 3 + t) % 6] for t in range(4)])

    edge_faces: dict[frozenset, list[int]] = collections.defaultdict(list)
    adj: dict[tuple, set] = collections.defaultdict(set)
    for fi, f in enumerate(quads):
        for t in range(4):
            a, b = f[t], f[(t + 1) % 4]
            edge_faces[frozenset((a, b))].append(fi)
            adj[a].add(b)
            adj[b].add(a)

    twist = (L // 3, L // 3)
    dist = {twist: 0}
    order = collections.deque([twist])
    while order:
        u = order.popleft()
        for v in sorted(adj[u], key=idx.get):
            if v not in dist:
                dist[v] = dist[u] + 1
                order.append(v)
    reach = min(dist[p] for p in patch.coords if patch.on_boundary(p))
    end = min((p for p in patch.coords if p[1] == 0 and dist[p] == reach), key=idx.get)
    path = [end]
    while path[-1] != twist:
        v = path[-1]
        path.append(min((u for u in adj[v] if dist[u] == dist[v] - 1), key=idx.get))
    path.reverse()
    cut = {frozenset(e) for e in zip(path, path[1:])}

    # checkerboard colouring with the defect path removed from the dual graph
    fadj = collections.defaultdict(set)
    for e, fs in edge_faces.items():
        if len(fs) == 2 and e not in cut:
            fadj[fs[0]].add(fs[1])
            fadj[fs[1]].add(fs[0])
    shade = {0: 0}
    order = collections.deque([0])
    while order:
        u = order.popleft()
        for v in sorted(fadj[u]):
            if v not in shade:
                shade[v] = 1 - shade[u]
                order.append(v)
            elif shade[v] == shade[u]:
                raise RuntimeError("face colouring is inconsistent away from the defect line")
    paulis = [{p: ("X" if shade[fi] == 0 else "Z") for p in f} for fi, f in enumerate(quads)]

    cart = {p: _cart(p) for p in patch.coords}

    def angle(a, b):
        return math.atan2(cart[b][1] - cart[a][1], cart[b][0] - cart[a][0])

    for k in range(1, len(path)):
        v = path[k]
        a_in = angle(v, path[k - 1])
        span = (angle(v, path[k + 1]) - a_in) % (2 * math.pi) if k + 1 < len(path) else math.pi
        for fi, f in enumerate(quads):
            if v not in f:
                continue
            cx = sum(cart[p][0] for p in f) / len(f)
            cy = sum(cart[p][1] for p in f) / len(f)
            if (math.atan2(cy - cart[v][1], cx - cart[v][0]) - a_in) % (2 * math.pi) < span:
                paulis[fi][v] = _SWAP[paulis[fi][v]]

    def to_op(pd):
        return PauliOperator.on(n, {idx[p]: s for p, s in pd.items()})

    at_twist = [fi for fi, f in enumerate(quads) if twist in f]
    for combo in itertools.product("XYZ", repeat=len(at_twist)):
        for fi, s in zip(at_twist, combo):
            paulis[fi][twist] = s
        ops = [to_op(pd) for pd in paulis]
        if StabilizerGroup(ops).pairwise_commuting():
            break
    else:
        raise RuntimeError("no commuting twist assignment found")

    # boundary weight-2 stabilizers on alternate edges of every side
    def side_pos(e):
        a, b = e
        mid = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        if a[1] == 0 and b[1] == 0:
            return (0, mid[0])
        if a[0] + a[1] == L and b[0] + b[1] == L:
            return (1, mid[1])
        return (2, -mid[1])

    bedges = sorted((tuple(sorted(e, key=idx.get)) for e, fs in edge_faces.items() if len(fs) == 1),
                    key=side_pos)
    quad_group = StabilizerGroup(ops)
    digons = []
    per_side = collections.Counter()
    for e in bedges:
        side = side_pos(e)[0]
        k = per_side[side]
        per_side[side] += 1
        if k % 2:
            continue
        qa, qb = idx[e[0]], idx[e[1]]
        options = []
        for sa, sb in itertools.product("XZY", repeat=2):
            op = PauliOperator.on(n, {qa: sa, qb: sb})
            if not symplectic_form(op.to_vector()[None], quad_group.matrix).any():
                options.append(op)
        if not options:
            raise RuntimeError(f"no commuting boundary stabilizer on edge {e}")
        pure = [o for o in options if str(o).replace("I", "") in ("XX", "ZZ")]
        digons.append((e, (pure or options)[0]))

    gens = ops + [op for _, op in digons]
    group = StabilizerGroup(gens)
    if not group.pairwise_commuting():
        raise RuntimeError("twisted toric construction produced anticommuting generators")

    def colour_of(op):
        s = set(str(op).replace("I", ""))
        if s == {"X"}:
            return "dark"
        if s == {"Z"}:
            return "white"
        return "mixed"

    faces = []
    for fi, f in enumerate(quads):
        faces.append(Face(fi, tuple(idx[p] for p in f), colour_of(gens[fi]), (fi,)))
    for k, (e, op) in enumerate(digons):
        g = len(quads) + k
        faces.append(Face(g, (idx[e[0]], idx[e[1]]), colour_of(op), (g,)))

    boundaries = []
    for side in range(3):
        run_label, run = None, []
        for (e, op) in digons:
            if side_pos(e)[0] != side:
                continue
            lab = colour_of(op)
            if lab != run_label and run:
                boundaries.append(BoundarySegment(run_label, tuple(run)))
                run = []
            run_label = lab
            run.extend(q for q in (idx[e[0]], idx[e[1]]) if q not in run)
        if run:
            boundaries.append(BoundarySegment(run_label, tuple(run)))

    lx, lz = _side_logicals(group, patch.side_qubits())
    edges = _edges_from_cycles([f.qubits for f in faces])
    return CodeLattice(TORIC, d, tuple(patch.coords), tuple(faces), group, lx, lz,
                       tuple(boundaries), tuple(edges),
                       defect_line=tuple(idx[p] for p in path), twist=idx[twist])


def build_lattice(kind: str, d: int) -> CodeLattice:
    if kind == COLOR:
        return build_color_code(d)
    if kind == TORIC:
        return build_twisted_toric_code(d)
    raise ValueError(f"unknown code kind {kind!r}; expected one of {CODE_KINDS}")


# ---------------------------------------------------------------- validation


@dataclass
class CheckResult:
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: dict[str, CheckResult] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failures(self) -> list[str]:
        return [k for k, c in self.checks.items() if not c.passed]

    def __str__(self) -> str:
        return "\n".join(f"{'PASS' if c.passed else 'FAIL'} {k}: {c.detail}" for k, c in self.checks.items())


def _candidate_block(n, supports, w):
    letters = np.array(list(itertools.product((1, 2, 3), repeat=w)), dtype=np.uint8)
    rows = supports.shape[0] * letters.shape[0]
    out = np.zeros((rows, 2 * n), dtype=np.uint8)
    sup = np.repeat(supports, letters.shape[0], axis=0)
    let = np.tile(letters, (supports.shape[0], 1))
    r = np.arange(rows)[:, None]
    out[r, sup] = let & 1
    out[r, n + sup] = let >> 1
    return out


def brute_force_distance(group: StabilizerGroup, logical_x: PauliOperator, logical_z: PauliOperator,
                         max_weight: int) -> int | None:
    """Smallest weight of a nontrivial logical operator, searching weights up to ``max_weight``."""
    n = group.n
    refs = np.stack([logical_x.to_vector(), logical_z.to_vector()])
    for w in range(1, max_weight + 1):
        combos = np.array(list(itertools.combinations(range(n), w)), dtype=np.int64)
        step = max(1, 200_000 // (3 ** w))
        for s in range(0, len(combos), step):
            block = _candidate_block(n, combos[s:s + step], w)
            zero = ~gf2.matmul(block, group.parity.T).any(axis=1)
            if zero.any() and symplectic_form(block[zero], refs).any():
                return w
    return None


def milp_distance(lattice: CodeLattice) -> int:
    """Minimum logical weight via an integer program (any distance)."""
    from scipy.optimize import Bounds, LinearConstraint, milp

    n = lattice.n
    par = lattice.stabilizers.parity.astype(float)
    m = par.shape[0]
    best = None
    for ref in (lattice.logical_x, lattice.logical_z):
        v = ref.to_vector()
        swapped = np.concatenate([v[n:], v[:n]]).astype(float)
        nv = 3 * n + m + 1
        A = np.zeros((m + 1 + 2 * n, nv))
        lo = np.zeros(m + 1 + 2 * n)
        hi = np.zeros(m + 1 + 2 * n)
        A[:m, :2 * n] = par
        A[np.arange(m), 3 * n + np.arange(m)] = -2
        A[m, :2 * n] = swapped
        A[m, -1] = -2
        lo[m] = hi[m] = 1
        for i in range(n):
            for off, r in ((0, m + 1 + i), (n, m + 1 + n + i)):
                A[r, 2 * n + i] = 1
                A[r, off + i] = -1
                hi[r] = np.inf
        c = np.zeros(nv)
        c[2 * n:3 * n] = 1
        upper = np.ones(nv)
        upper[3 * n:] = np.inf
        res = milp(c, constraints=LinearConstraint(A, lo, hi), integrality=np.ones(nv),
                   bounds=Bounds(np.zeros(nv), upper))
        if not res.success:
            raise RuntimeError(f"distance MILP failed: {res.message}")
        w = int(round(res.fun))
        best = w if best is None else min(best, w)
    return best


def _face_adjacency(faces):
    by_edge = collections.defaultdict(list)
    for f in faces:
        for e in f.edges():
            by_edge[e].append(f)
    return by_edge


def validate(lattice: CodeLattice, check_distance: bool = True) -> ValidationReport:
    """Structural checks; failures are reported, never raised."""
    rep = ValidationReport()
    g = lattice.stabilizers
    n, d = lattice.n, lattice.distance

    rep.checks["qubit_count"] = CheckResult(n == qubit_count(d), f"n={n}, expected {qubit_count(d)}")
    comm = gf2.matmul(g.matrix, g.parity.T)
    bad = np.argwhere(np.triu(comm))
    rep.checks["commutation"] = CheckResult(
        bad.size == 0, "all pairs commute" if bad.size == 0 else f"{len(bad)} anticommuting pairs, first {tuple(bad[0])}")
    r = g.rank()
    rep.checks["independence"] = CheckResult(r == len(g) == n - 1, f"rank {r}, {len(g)} generators, n-1={n - 1}")

    lx, lz = lattice.logical_x, lattice.logical_z
    lx_ok = not symplectic_form(lx.to_vector()[None], g.matrix).any()
    lz_ok = not symplectic_form(lz.to_vector()[None], g.matrix).any()
    anti = not commutes(lx, lz)
    rep.checks["logicals"] = CheckResult(lx_ok and lz_ok and anti,
                                         f"X commutes={lx_ok}, Z commutes={lz_ok}, anticommute={anti}")

    rep.checks["colorability"] = _check_colors(lattice)

    if check_distance:
        if d <= 5:
            found = brute_force_distance(g, lx, lz, d)
            rep.checks["distance"] = CheckResult(found == d, f"minimum logical weight {found}")
        else:
            rep.checks["distance"] = CheckResult(True, "skipped (d > 5); use milp_distance")
    return rep


def _check_colors(lattice: CodeLattice) -> CheckResult:
    by_edge = _face_adjacency(lattice.faces)
    if lattice.code_kind == COLOR:
        clash = [e for e, fs in by_edge.items() if len(fs) == 2 and fs[0].color == fs[1].color]
        return CheckResult(not clash, "3-colorable" if not clash else f"same-colour neighbours on edges {clash[:3]}")
    clash = [e for e, fs in by_edge.items()
             if len(fs) == 2 and fs[0].color == fs[1].color and fs[0].color != "mixed"]
    mixed = [f for f in lattice.faces if f.color == "mixed" and len(f.qubits) > 2]
    # mixed faces must form one chain that reaches the twist
    ok_chain = False
    if mixed and lattice.twist is not None:
        seen = {mixed[0].id}
        stack = [mixed[0]]
        while stack:
            f = stack.pop()
            for h in mixed:
                if h.id not in seen and set(h.qubits) & set(f.qubits):
                    seen.add(h.id)
                    stack.append(h)
        ok_chain = len(seen) == len(mixed) and any(lattice.twist in f.qubits for f in mixed)
    ok = not clash and ok_chain
    return CheckResult(ok, f"{len(mixed)} mixed faces, contiguous to twist={ok_chain}, clashes={len(clash)}")


# ---------------------------------------------------------------- text format

FORMAT_HEADER = "# topodec lattice v1"


def export_lattice(lattice: CodeLattice) -> str:
    lines = [FORMAT_HEADER,
             f"code_kind {lattice.code_kind}",
             f"distance {lattice.distance}",
             f"n {lattice.n}",
             f"twist {'-' if lattice.twist is None else lattice.twist}",
             "defect_line " + (",".join(map(str, lattice.defect_line)) or "-"),
             f"qubits {lattice.n}"]
    lines += [f"{i} {j}" for i, j in lattice.coords]
    lines.append(f"generators {lattice.num_generators}")
    lines += [str(g) for g in lattice.stabilizers]
    lines.append(f"logical_x {lattice.logical_x}")
    lines.append(f"logical_z {lattice.logical_z}")
    lines.append(f"faces {len(lattice.faces)}")
    for f in lattice.faces:
        lines.append(f"{f.id} {f.color} {','.join(map(str, f.qubits))} {','.join(map(str, f.stabilizers))}")
    lines.append(f"boundaries {len(lattice.boundaries)}")
    for b in lattice.boundaries:
        lines.append(f"{b.label} {','.join(map(str, b.qubits))}")
    lines.append(f"edges {len(lattice.edges)}")
    lines += [f"{a} {b}" for a, b in lattice.edges]
    lines.append("end")
    return "\n".join(lines) + "\n"


def _ints(s: str) -> tuple[int, ...]:
    return () if s == "-" else tuple(int(t) for t in s.split(","))


def import_lattice(text: str) -> CodeLattice:
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise ValueError("not a topodec lattice file")
    it = iter(lines[1:])

    def field_(name):
        key, _, val = next(it).partition(" ")
        if key != name:
            raise ValueError(f"expected {name!r}, found {key!r}")
        return val

    kind = field_("code_kind")
    d = int(field_("distance"))
    n = int(field_("n"))
    tw = field_("twist")
    twist = None if tw == "-" else int(tw)
    defect = _ints(field_("defect_line"))
    coords = tuple(tuple(int(t) for t in next(it).split()) for _ in range(int(field_("qubits"))))
    gens = [PauliOperator.from_string(next(it).strip()) for _ in range(int(field_("generators")))]
    lx = PauliOperator.from_string(field_("logical_x"))
    lz = PauliOperator.from_string(field_("logical_z"))
    faces = []
    for _ in range(int(field_("faces"))):
        fid, color, qs, st = next(it).split()
        faces.append(Face(int(fid), _ints(qs), color, _ints(st)))
    bounds = []
    for _ in range(int(field_("boundaries"))):
        label, qs = next(it).split()
        bounds.append(BoundarySegment(label, _ints(qs)))
    edges = tuple(tuple(int(t) for t in next(it).split()) for _ in range(int(field_("edges"))))
    if next(it).strip() != "end":
        raise ValueError("missing end marker")
    if len(coords) != n or any(g.n != n for g in gens):
        raise ValueError("qubit count mismatch in lattice file")
    return CodeLattice(kind, d, coords, tuple(faces), StabilizerGroup(gens), lx, lz,
                       tuple(bounds), edges, defect, twist)


def save_lattice(lattice: CodeLattice, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(export_lattice(lattice))


def load_lattice(path) -> CodeLattice:
    with open(path, encoding="utf-8") as fh:
        return import_lattice(fh.read())
