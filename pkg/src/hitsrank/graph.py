"""Graph model, the Gamma_{h,k,n} construction, and edge-list file I/O.

Vertex numbering of a Gamma graph is fixed: the full component occupies
indices ``0 .. 2n+m`` in label order ``v_{-n} .. v_{n+m}``, followed by the
``ell`` copies in order, each laid out as ``u_{-n} .. u_{-1}, u_1 .. u_{n+m}``.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import ConstraintViolation, InvalidParameter, ParseError


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable directed graph; undirected graphs are symmetric arc sets.

    Attributes:
        num_vertices: number of vertices, indexed ``0 .. num_vertices-1``.
        arcs: set of ``(source, target)`` pairs.
        is_symmetric: whether every arc has its reverse (undirected graph).
        labels: one unique label per vertex; defaults to the decimal index.
    """

    num_vertices: int
    arcs: frozenset
    is_symmetric: bool = True
    labels: tuple = field(default=None)

    def __post_init__(self):
        n = self.num_vertices
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise InvalidParameter(f"num_vertices must be a nonnegative integer, got {n!r}")
        object.__setattr__(self, "num_vertices", int(n))
        arcs = frozenset((int(a), int(b)) for a, b in self.arcs)
        object.__setattr__(self, "arcs", arcs)
        for a, b in arcs:
            if not (0 <= a < n and 0 <= b < n):
                raise InvalidParameter(f"arc ({a}, {b}) has an endpoint outside [0, {n})")
            if a == b:
                raise InvalidParameter(f"self-loop at vertex {a}")
        if self.is_symmetric:
            for a, b in arcs:
                if (b, a) not in arcs:
                    raise InvalidParameter(f"arc ({a}, {b}) has no reverse in a symmetric graph")
        if self.labels is None:
            labels = tuple(str(i) for i in range(n))
        else:
            labels = tuple(str(s) for s in self.labels)
        if len(labels) != n:
            raise InvalidParameter(f"expected {n} labels, got {len(labels)}")
        if len(set(labels)) != n:
            raise InvalidParameter("vertex labels must be unique")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def undirected(cls, num_vertices, edges, labels=None):
        """Build a symmetric graph from undirected edges ``(i, j)``."""
        arcs = set()
        for a, b in edges:
            arcs.add((a, b))
            arcs.add((b, a))
        return cls(num_vertices, frozenset(arcs), True, labels)

    @classmethod
    def directed(cls, num_vertices, arcs, labels=None):
        arcs = frozenset(arcs)
        symmetric = all((b, a) in arcs for a, b in arcs)
        return cls(num_vertices, arcs, symmetric, labels)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and self.is_symmetric == other.is_symmetric
            and self.arcs == other.arcs
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.num_vertices, self.is_symmetric, self.arcs, self.labels))

    def __repr__(self):
        kind = "undirected" if self.is_symmetric else "directed"
        return f"Graph({self.num_vertices} vertices, {self.num_edges} {kind} edges)"

    @property
    def num_arcs(self):
        return len(self.arcs)

    @property
    def num_edges(self):
        """Undirected edge count for symmetric graphs, arc count otherwise."""
        return len(self.arcs) // 2 if self.is_symmetric else len(self.arcs)

    def edges(self):
        """Sorted edge list: ``i < j`` pairs when symmetric, all arcs otherwise."""
        if self.is_symmetric:
            return sorted((a, b) for a, b in self.arcs if a < b)
        return sorted(self.arcs)

    @cached_property
    def out_neighbors(self):
        """Per-vertex tuple of out-neighbors, ascending."""
        nbrs = [[] for _ in range(self.num_vertices)]
        for a, b in self.arcs:
            nbrs[a].append(b)
        return tuple(tuple(sorted(x)) for x in nbrs)

    @cached_property
    def in_neighbors(self):
        """Per-vertex tuple of in-neighbors, ascending."""
        if self.is_symmetric:
            return self.out_neighbors
        nbrs = [[] for _ in range(self.num_vertices)]
        for a, b in self.arcs:
            nbrs[b].append(a)
        return tuple(tuple(sorted(x)) for x in nbrs)

    def degree(self, v):
        return len(self.out_neighbors[v])

    def degrees(self):
        return [len(x) for x in self.out_neighbors]

    def in_csr(self):
        """CSR arrays ``(indptr, indices)`` of in-neighbor lists."""
        return _csr(self.in_neighbors)

    def out_csr(self):
        return _csr(self.out_neighbors)

    def adjacency_matrix(self, dtype=np.float64):
        """Dense matrix with ``A[i, j] = 1`` iff arc ``i -> j``."""
        A = np.zeros((self.num_vertices, self.num_vertices), dtype=dtype)
        for a, b in self.arcs:
            A[a, b] = 1
        return A

    def index_of(self, label):
        try:
            return self._label_index[label]
        except KeyError:
            raise KeyError(f"no vertex labelled {label!r}") from None

    @cached_property
    def _label_index(self):
        return {s: i for i, s in enumerate(self.labels)}

    @cached_property
    def components(self):
        """Weakly connected components as sorted index tuples, ordered by min index."""
        seen = [False] * self.num_vertices
        undirected = [set(o) | set(i) for o, i in zip(self.out_neighbors, self.in_neighbors)]
        comps = []
        for s in range(self.num_vertices):
            if seen[s]:
                continue
            seen[s] = True
            comp = [s]
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for y in undirected[x]:
                    if not seen[y]:
                        seen[y] = True
                        comp.append(y)
                        queue.append(y)
            comps.append(tuple(sorted(comp)))
        return tuple(comps)

    def distances_from(self, source):
        """BFS hop distances along undirected adjacency; unreachable vertices get ``None``."""
        dist = [None] * self.num_vertices
        dist[source] = 0
        queue = deque([source])
        while queue:
            x = queue.popleft()
            for y in self.out_neighbors[x]:
                if dist[y] is None:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        return dist

    def with_edge(self, i, j):
        """Copy with one extra undirected edge (directed arc when not symmetric)."""
        arcs = set(self.arcs)
        arcs.add((i, j))
        if self.is_symmetric:
            arcs.add((j, i))
        return Graph(self.num_vertices, frozenset(arcs), self.is_symmetric, self.labels)

    def induced_subgraph(self, vertices):
        """Subgraph on ``vertices`` (kept in the given order), labels preserved."""
        vertices = list(vertices)
        pos = {v: p for p, v in enumerate(vertices)}
        arcs = {(pos[a], pos[b]) for a, b in self.arcs if a in pos and b in pos}
        return Graph(len(vertices), frozenset(arcs), self.is_symmetric,
                     tuple(self.labels[v] for v in vertices))


def _csr(neighbor_lists):
    indptr = np.zeros(len(neighbor_lists) + 1, dtype=np.int64)
    np.cumsum([len(x) for x in neighbor_lists], out=indptr[1:])
    indices = np.fromiter((y for x in neighbor_lists for y in x), dtype=np.int64,
                          count=int(indptr[-1]))
    return indptr, indices


# ---------------------------------------------------------------------------
# Gamma construction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaParams:
    """Validated ``(h, k, n)`` with the derived hub count, copy count and size."""

    h: int
    k: int
    n: int
    m: int
    ell: int
    N: int

    @property
    def bar_size(self):
        return 2 * self.n + self.m + 1

    @property
    def copy_size(self):
        return 2 * self.n + self.m

    @property
    def N_closed_form(self):
        return -(-(self.k - 2) // (self.h - 3)) * (2 * self.n + self.h - 3) + 1

    @property
    def N_by_parts(self):
        return self.bar_size + self.ell * self.copy_size

    def as_dict(self):
        return {"h": self.h, "k": self.k, "n": self.n, "m": self.m, "ell": self.ell, "N": self.N}


def validate_params(h, k, n):
    """Check ``k > h > 5``, ``n`` odd and ``n >= max(3, (k-h+2)/2)``; derive m, ell, N.

    Raises ConstraintViolation naming the first failed constraint.
    """
    for name, val in (("h", h), ("k", k), ("n", n)):
        if isinstance(val, bool) or not isinstance(val, (int, np.integer)):
            raise InvalidParameter(f"{name} must be an integer, got {val!r}")
    h, k, n = int(h), int(k), int(n)
    if not k > h:
        raise ConstraintViolation("k > h", f"k={k}, h={h}")
    if not h > 5:
        raise ConstraintViolation("h > 5", f"h={h}")
    if n % 2 != 1:
        raise ConstraintViolation("n odd", f"n={n}")
    if not n >= 3:
        raise ConstraintViolation("n >= 3", f"n={n}")
    if not 2 * n >= k - h + 2:
        raise ConstraintViolation("n >= (k-h+2)/2", f"n={n}, (k-h+2)/2={(k - h + 2) / 2:g}")
    m = h - 3
    ell = -(-(k - h + 1) // m)
    N = -(-(k - 2) // m) * (2 * n + m) + 1
    params = GammaParams(h, k, n, m, ell, N)
    if params.N_by_parts != N:
        raise AssertionError(f"vertex-count formulas disagree: {N} vs {params.N_by_parts}")
    if ell * m < k - h + 1:
        raise AssertionError("too few outside hubs")
    return params


def _check_mn(m, n):
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 3:
        raise InvalidParameter(f"m must be an integer >= 3, got {m!r}")
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 3 or n % 2 == 0:
        raise InvalidParameter(f"n must be an odd integer >= 3, got {n!r}")


def _component(m, n, with_center, prefix, offset):
    """Labels and undirected edges of one component, vertex indices shifted by ``offset``."""
    order = [i for i in range(-n, n + m + 1) if with_center or i != 0]
    pos = {i: offset + p for p, i in enumerate(order)}
    letter = "v" if with_center else "u"
    labels = [f"{prefix}:{letter}:{i}" for i in order]
    edges = []
    for i in range(-n + 1, n + 1):
        if i in pos and i - 1 in pos:
            edges.append((pos[i - 1], pos[i]))
    for j in range(1, m + 1):
        edges.append((pos[-n], pos[n + j]))
        edges.append((pos[n], pos[n + j]))
    return labels, edges


def build_gamma_bar(m, n):
    """The full component: chain ``v_{-n} .. v_n`` plus ``m`` hubs on both chain ends."""
    _check_mn(m, n)
    labels, edges = _component(m, n, True, "bar", 0)
    return Graph.undirected(len(labels), edges, labels)


def build_gamma_copy(m, n, copy=1):
    """One padding copy: the full component with its center vertex deleted."""
    _check_mn(m, n)
    labels, edges = _component(m, n, False, f"copy{copy}", 0)
    return Graph.undirected(len(labels), edges, labels)


@dataclass(frozen=True, eq=False)
class GammaGraph:
    graph: Graph
    params: GammaParams
    role_index: dict

    def v(self, i):
        """Index of ``v_i`` in the full component."""
        return self.role_index[f"bar:v:{i}"]

    def u(self, i, copy=1):
        """Index of ``u_i`` in padding copy ``copy``."""
        return self.role_index[f"copy{copy}:u:{i}"]

    def hubs(self, copy=0):
        """Hub indices of the full component (``copy=0``) or of a padding copy."""
        p = self.params
        if copy == 0:
            return [self.v(p.n + j) for j in range(1, p.m + 1)]
        return [self.u(p.n + j, copy) for j in range(1, p.m + 1)]

    @property
    def bar_range(self):
        return range(0, self.params.bar_size)

    def copy_range(self, copy):
        p = self.params
        start = p.bar_size + (copy - 1) * p.copy_size
        return range(start, start + p.copy_size)

    def outside_bar(self):
        return range(self.params.bar_size, self.params.N)

    @classmethod
    def from_graph(cls, graph, params):
        """Attach role labels of an already-built (possibly perturbed) graph.

        Raises NotGammaGraph when a required role label is missing.
        """
        from .errors import NotGammaGraph

        index = {}
        p = params
        want = [f"bar:v:{i}" for i in range(-p.n, p.n + p.m + 1)]
        for c in range(1, p.ell + 1):
            want += [f"copy{c}:u:{i}" for i in range(-p.n, p.n + p.m + 1) if i != 0]
        for lab in want:
            try:
                index[lab] = graph.index_of(lab)
            except KeyError:
                raise NotGammaGraph(f"graph lacks role label {lab!r}") from None
        return cls(graph, params, index)


def build_gamma(params):
    """Assemble the full component and ``ell`` padding copies, disconnected from each other."""
    m, n = params.m, params.n
    labels, edges = _component(m, n, True, "bar", 0)
    for c in range(1, params.ell + 1):
        lab, e = _component(m, n, False, f"copy{c}", len(labels))
        labels += lab
        edges += e
    graph = Graph.undirected(len(labels), edges, labels)
    if graph.num_vertices != params.N:
        raise AssertionError(f"built {graph.num_vertices} vertices, expected N={params.N}")
    return GammaGraph(graph, params, {s: i for i, s in enumerate(labels)})


def gamma_from_hkn(h, k, n):
    return build_gamma(validate_params(h, k, n))


# ---------------------------------------------------------------------------
# Edge-list I/O
# ---------------------------------------------------------------------------

def default_label_path(path):
    return Path(str(os.fspath(path)) + ".labels")


def save_graph(graph, path, label_path=None):
    """Write ``N M directed|undirected`` then one ``i j`` line per edge.

    Labels go to a companion ``index<TAB>label`` file (``<path>.labels`` by
    default) unless they are the default decimal indices.
    """
    path = Path(path)
    kind = "undirected" if graph.is_symmetric else "directed"
    edges = graph.edges()
    lines = [f"{graph.num_vertices} {len(edges)} {kind}"]
    lines += [f"{a} {b}" for a, b in edges]
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    default = tuple(str(i) for i in range(graph.num_vertices))
    if label_path is None and graph.labels == default:
        return path
    label_path = Path(label_path) if label_path is not None else default_label_path(path)
    for lab in graph.labels:
        if "\t" in lab or "\n" in lab:
            raise InvalidParameter(f"label {lab!r} contains a tab or newline")
    label_path.write_text(
        "".join(f"{i}\t{lab}\n" for i, lab in enumerate(graph.labels)), encoding="utf-8"
    )
    return path


def _parse_int(tok, line, path):
    if not tok.isdigit() or not tok.isascii():
        raise ParseError(f"expected a nonnegative decimal integer, got {tok!r}", line, path)
    return int(tok)


def load_graph(path, label_path=None):
    """Inverse of save_graph; rejects self-loops, repeated arcs and bad endpoints."""
    path = Path(path)
    text = path.read_text(encoding="ascii", errors="strict")
    rows = text.splitlines()
    if not rows or not rows[0].strip():
        raise ParseError("missing header line", 1, path)
    head = rows[0].split()
    if len(head) != 3 or head[2] not in ("directed", "undirected"):
        raise ParseError("header must be 'N M directed|undirected'", 1, path)
    N = _parse_int(head[0], 1, path)
    M = _parse_int(head[1], 1, path)
    symmetric = head[2] == "undirected"
    body = [(lineno, r) for lineno, r in enumerate(rows[1:], start=2) if r.strip()]
    if len(body) != M:
        raise ParseError(f"header declares {M} edges, found {len(body)}", len(rows), path)
    arcs = set()
    for lineno, row in body:
        toks = row.split()
        if len(toks) != 2:
            raise ParseError("edge line must be 'i j'", lineno, path)
        a, b = (_parse_int(t, lineno, path) for t in toks)
        if a >= N or b >= N:
            raise ParseError(f"endpoint out of range [0, {N})", lineno, path)
        if a == b:
            raise ParseError(f"self-loop at vertex {a}", lineno, path)
        if (a, b) in arcs:
            raise ParseError(f"repeated edge ({a}, {b})", lineno, path)
        arcs.add((a, b))
        if symmetric:
            arcs.add((b, a))
    if label_path is None:
        candidate = default_label_path(path)
        label_path = candidate if candidate.exists() else None
    labels = None
    if label_path is not None:
        labels = _load_labels(Path(label_path), N)
    return Graph(N, frozenset(arcs), symmetric, labels)


def _load_labels(path, N):
    labels = [None] * N
    for lineno, row in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not row:
            continue
        idx, sep, lab = row.partition("\t")
        if not sep:
            raise ParseError("label line must be 'index<TAB>label'", lineno, path)
        i = _parse_int(idx, lineno, path)
        if i >= N:
            raise ParseError(f"label index {i} out of range [0, {N})", lineno, path)
        if labels[i] is not None:
            raise ParseError(f"duplicate label index {i}", lineno, path)
        labels[i] = lab
    missing = [i for i, lab in enumerate(labels) if lab is None]
    if missing:
        raise ParseError(f"no label for vertex {missing[0]}", None, path)
    if len(set(labels)) != N:
        raise ParseError("labels are not unique", None, path)
    return tuple(labels)


def graph_io_roundtrip(graph, path):
    save_graph(graph, path)
    return load_graph(path)
