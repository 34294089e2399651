"""Graph Laplacians, algebraic connectivity, grounded minors, the anchored
extremal program, and the octopus graph family."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_NODES = 4096
# Eigenvalues below this fraction of ||L||_inf are treated as zero when
# deciding connectivity / rank.
_ZERO_REL = 1e-9


@dataclass(frozen=True)
class GraphSpec:
    """Simple undirected graph: node count plus an edge list of unordered pairs."""

    n_nodes: int
    edges: tuple

    def __post_init__(self) -> None:
        if not (1 <= self.n_nodes <= MAX_NODES):
            raise ValueError(f"node count {self.n_nodes} outside [1, {MAX_NODES}]")
        seen = set()
        norm = []
        for (i, j) in self.edges:
            i, j = int(i), int(j)
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise ValueError(f"edge ({i},{j}) out of range for {self.n_nodes} nodes")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(norm))

    def to_text(self) -> str:
        """Edge-list serialization: first line node count, then one 'i j' per line."""
        lines = [str(self.n_nodes)]
        lines += [f"{i} {j}" for (i, j) in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GraphSpec":
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        n = int(lines[0])
        edges = [tuple(int(x) for x in ln.split()) for ln in lines[1:]]
        return cls(n, tuple(edges))


def _components(n_nodes: int, edges) -> np.ndarray:
    """Connected-component labels by union-find."""
    parent = list(range(n_nodes))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (i, j) in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
    roots = [find(x) for x in range(n_nodes)]
    _, labels = np.unique(roots, return_inverse=True)
    return labels


@dataclass(frozen=True)
class LaplacianView:
    """Dense Laplacian with cached spectrum and component partition."""

    graph: GraphSpec
    matrix: np.ndarray = field(default=None)
    eigenvalues: np.ndarray = field(default=None)
    components: np.ndarray = field(default=None)

    @property
    def n_nodes(self) -> int:
        return self.graph.n_nodes

    @property
    def n_components(self) -> int:
        return int(self.components.max()) + 1

    @property
    def connected(self) -> bool:
        return self.n_components == 1


def laplacian(g: GraphSpec) -> LaplacianView:
    """Degree matrix minus adjacency matrix, with a dense symmetric eigensolve."""
    L = np.zeros((g.n_nodes, g.n_nodes))
    for (i, j) in g.edges:
        L[i, i] += 1.0
        L[j, j] += 1.0
        L[i, j] -= 1.0
        L[j, i] -= 1.0
    eig = np.sort(np.linalg.eigvalsh(L)) if g.n_nodes > 0 else np.array([])
    return LaplacianView(graph=g, matrix=L, eigenvalues=eig, components=_components(g.n_nodes, g.edges))


def _zero_threshold(view: LaplacianView) -> float:
    scale = np.abs(view.matrix).sum(axis=1).max() if view.graph.edges else 1.0
    return _ZERO_REL * max(scale, 1.0)


def algebraic_connectivity(view: LaplacianView) -> float:
    """Second-smallest Laplacian eigenvalue; zero iff the graph is disconnected."""
    if view.n_nodes < 2:
        raise ValueError("algebraic connectivity needs at least 2 nodes")
    lam2 = float(view.eigenvalues[1])
    thr = _zero_threshold(view)
    # Cross-check the spectral connectivity signal against the components.
    spectral_connected = lam2 > thr
    if spectral_connected != view.connected:
        raise AssertionError(
            f"lambda_2 = {lam2} disagrees with component count {view.n_components}"
        )
    return 0.0 if not view.connected else lam2


def grounded_minor(view: LaplacianView, node: int) -> tuple[np.ndarray, np.ndarray]:
    """Laplacian with row/column ``node`` deleted, plus its sorted eigenvalues.

    Only defined (full rank) for connected graphs.
    """
    if not view.connected:
        raise ValueError("grounded minor is rank-deficient on a disconnected graph")
    keep = [i for i in range(view.n_nodes) if i != node]
    M = view.matrix[np.ix_(keep, keep)]
    eig = np.sort(np.linalg.eigvalsh(M)) if len(keep) else np.array([])
    if len(keep) and eig[0] <= _zero_threshold(view):
        raise AssertionError(f"grounded minor not full rank: min eigenvalue {eig[0]}")
    return M, eig


def extremal_range(view: LaplacianView, budget: float, node: int, anchor_value: float = 0.0):
    """Worst-case deviation from an anchored value under a smoothness budget.

    Maximize ||loss - v 1||_inf subject to loss' L loss <= C^2 and
    loss(node) = v. Returns (exact, nominal): the exact value C/sqrt(mu_1) via
    the grounded minor at ``node``, and the nominal algebraic-connectivity form
    C/sqrt(lambda_2). Exact >= nominal always (interlacing).
    """
    del anchor_value  # the program value is translation invariant
    if budget < 0:
        raise ValueError(f"budget must be nonnegative, got {budget}")
    if not view.connected:
        raise ValueError("deviation bound is vacuous on a disconnected graph")
    _, mu = grounded_minor(view, node)
    exact = budget / np.sqrt(mu[0])
    nominal = budget / np.sqrt(algebraic_connectivity(view))
    return float(exact), float(nominal)


def octopus(n_nodes: int, tentacle_len: int) -> GraphSpec:
    """Tree of (k-1)/d equal-length paths attached to one central node.

    Node k-1 (0-indexed) is the center; tentacle r occupies nodes
    r*d .. r*d + d - 1, with position d-1 the far endpoint.
    """
    k, d = n_nodes, tentacle_len
    if d < 1:
        raise ValueError(f"tentacle length must be >= 1, got {d}")
    if k < d + 1 or (k - 1) % d != 0:
        raise ValueError(f"tentacle length {d} must divide node count minus one ({k - 1})")
    edges = []
    center = k - 1
    for i in range(k - 1):
        if i % d == 0:
            edges.append((i, center))  # tentacle root attaches to the center
        if i % d != d - 1:
            edges.append((i, i + 1))  # consecutive nodes along a tentacle
    return GraphSpec(k, tuple(edges))


def octopus_endpoints(n_nodes: int, tentacle_len: int) -> list[int]:
    """Far endpoint of each tentacle (the nodes at maximal distance from the center)."""
    return list(range(tentacle_len - 1, n_nodes - 1, tentacle_len))


def smoothness(losses, view: LaplacianView) -> float:
    """Quadratic form loss' L loss = sum over edges of squared differences."""
    lv = np.asarray(losses, dtype=float)
    if lv.shape != (view.n_nodes,):
        raise ValueError(f"loss shape {lv.shape} != ({view.n_nodes},)")
    return float(lv @ view.matrix @ lv)


def smoothness_edge_sum(losses, g: GraphSpec) -> float:
    """Edge-sum form of the quadratic form; agrees with the matrix form."""
    lv = np.asarray(losses, dtype=float)
    return float(sum((lv[i] - lv[j]) ** 2 for (i, j) in g.edges))
