"""Seeded loss-generating processes.

Every environment materializes its full T x K loss matrix up front from its own
random stream (the adversary is oblivious: nothing the learner does can touch
the losses), and validates its declared contracts at construction: losses in
[0, 1], interval side information truthful, smoothness budget respected.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import RngHandle, _as_generator
from .reduction import SideInfo
from .spectral import (
    GraphSpec,
    LaplacianView,
    laplacian,
    octopus,
    octopus_endpoints,
    smoothness,
)

MAX_CELLS = 10**8
_VAL_TOL = 1e-9


@dataclass
class EnvironmentInstance:
    """An immutable, fully materialized loss process plus its declared contracts."""

    kind: str
    losses: np.ndarray  # (T, K)
    seed: int | None = None
    hidden_best: int | None = None
    anchors: np.ndarray | None = None  # (T,)
    anchored_arms: np.ndarray | None = None  # (T,)
    side_m: np.ndarray | None = None  # (T, K)
    side_eps: np.ndarray | None = None  # (T, K)
    graph: GraphSpec | None = None
    budget: float | None = None
    component_anchors: np.ndarray | None = None  # (T, n_components)
    range_cap: float | None = None  # cap on the within-round loss spread
    full_info: bool = False
    clip_events: int = 0
    params: dict = field(default_factory=dict)
    _view: LaplacianView | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        self.losses = np.asarray(self.losses, dtype=float)
        if self.losses.ndim != 2:
            raise ValueError(f"loss matrix must be 2-d, got shape {self.losses.shape}")
        if self.losses.size > MAX_CELLS:
            raise ValueError(f"loss matrix has {self.losses.size} cells, cap is {MAX_CELLS}")

    @property
    def T(self) -> int:
        return self.losses.shape[0]

    @property
    def n_arms(self) -> int:
        return self.losses.shape[1]

    @property
    def laplacian_view(self) -> LaplacianView | None:
        if self.graph is not None and self._view is None:
            self._view = laplacian(self.graph)
        return self._view

    def loss(self, t: int, arm: int) -> float:
        return float(self.losses[t, arm])

    def loss_vector(self, t: int) -> np.ndarray:
        return self.losses[t]

    def anchor(self, t: int) -> float:
        if self.anchors is None:
            raise ValueError(f"environment {self.kind!r} publishes no anchors")
        return float(self.anchors[t])

    def side_info(self, t: int) -> SideInfo:
        if self.side_m is None:
            raise ValueError(f"environment {self.kind!r} declares no side information")
        return SideInfo(m=self.side_m[t], eps=self.side_eps[t])

    def validate(self) -> list[tuple[str, bool, str]]:
        """Run every declared contract check; returns (name, passed, detail) rows."""
        checks = []
        lo, hi = self.losses.min(), self.losses.max()
        checks.append(("loss_range", -_VAL_TOL <= lo and hi <= 1 + _VAL_TOL,
                       f"losses in [{lo:.6g}, {hi:.6g}]"))
        if self.side_m is not None:
            dev = np.abs(self.losses - self.side_m) - self.side_eps
            worst = float(dev.max())
            checks.append(("side_info_truthful", worst <= _VAL_TOL,
                           f"worst interval excess {worst:.3g}"))
        if self.graph is not None and self.budget is not None:
            view = self.laplacian_view
            worst = max(smoothness(self.losses[t], view) for t in range(self.T))
            checks.append(("smoothness_budget", worst <= self.budget**2 + _VAL_TOL,
                           f"max quadratic form {worst:.6g} vs budget^2 {self.budget**2:.6g}"))
        if self.anchors is not None and self.anchored_arms is not None:
            arms = np.asarray(self.anchored_arms, dtype=int)
            got = self.losses[np.arange(self.T), arms]
            worst = float(np.abs(got - self.anchors).max())
            checks.append(("anchor_is_some_arms_loss", worst <= _VAL_TOL,
                           f"worst anchor mismatch {worst:.3g}"))
        if self.range_cap is not None:
            spread = float((self.losses.max(axis=1) - self.losses.min(axis=1)).max())
            checks.append(("effective_range", spread <= self.range_cap + _VAL_TOL,
                           f"max within-round spread {spread:.6g} vs cap {self.range_cap:.6g}"))
        return checks

    def validate_or_raise(self) -> None:
        failures = [c for c in self.validate() if not c[1]]
        if failures:
            raise AssertionError(f"environment {self.kind!r} failed validation: {failures}")

    # -- CSV instance format (cross-implementation reproduction) -------------

    def export_csv(self, path) -> None:
        """Write 't,arm,loss' rows plus a JSON sidecar with the declared contracts."""
        path = Path(path)
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["t", "arm", "loss"])
            for t in range(self.T):
                for i in range(self.n_arms):
                    w.writerow([t, i, repr(float(self.losses[t, i]))])
        meta = {
            "kind": self.kind,
            "seed": self.seed,
            "T": self.T,
            "K": self.n_arms,
            "hidden_best": self.hidden_best,
            "anchors": None if self.anchors is None else self.anchors.tolist(),
            "anchored_arms": None if self.anchored_arms is None
                             else np.asarray(self.anchored_arms).tolist(),
            "side_m": None if self.side_m is None else self.side_m.tolist(),
            "side_eps": None if self.side_eps is None else self.side_eps.tolist(),
            "graph": None if self.graph is None else self.graph.to_text(),
            "budget": self.budget,
            "component_anchors": None if self.component_anchors is None
                                 else self.component_anchors.tolist(),
            "range_cap": self.range_cap,
            "full_info": self.full_info,
            "params": self.params,
        }
        with open(path.with_suffix(path.suffix + ".meta.json"), "w") as f:
            json.dump(meta, f, indent=1)

    @classmethod
    def import_csv(cls, path) -> "EnvironmentInstance":
        path = Path(path)
        with open(path.with_suffix(path.suffix + ".meta.json")) as f:
            meta = json.load(f)
        losses = np.zeros((meta["T"], meta["K"]))
        with open(path, newline="") as f:
            r = csv.reader(f)
            next(r)
            for t, i, v in r:
                losses[int(t), int(i)] = float(v)

        def arr(key):
            return None if meta[key] is None else np.asarray(meta[key], dtype=float)

        env = cls(
            kind=meta["kind"],
            losses=losses,
            seed=meta["seed"],
            hidden_best=meta["hidden_best"],
            anchors=arr("anchors"),
            anchored_arms=None if meta["anchored_arms"] is None
                          else np.asarray(meta["anchored_arms"], dtype=int),
            side_m=arr("side_m"),
            side_eps=arr("side_eps"),
            graph=None if meta["graph"] is None else GraphSpec.from_text(meta["graph"]),
            budget=meta["budget"],
            component_anchors=arr("component_anchors"),
            range_cap=meta["range_cap"],
            full_info=meta["full_info"],
            params=meta["params"],
        )
        env.validate_or_raise()
        return env


def _tile(vec, T):
    return np.tile(np.asarray(vec, dtype=float), (T, 1))


def bandit_lower_bound_env(eps, T: int, rng) -> EnvironmentInstance:
    """Two-point losses m +- eps(i) around the common center m = max eps, with a
    hidden arm J whose loss is biased low by a hard-to-detect margin."""
    gen = _as_generator(rng)
    eps = np.asarray(eps, dtype=float)
    if np.any(eps < 0):
        raise ValueError("radii must be nonnegative")
    sq = eps**2
    total = sq.sum()
    if total <= 0:
        raise ValueError("at least one radius must be positive")
    pos = eps > 0
    if sq[pos].min() < (2.0 / T) * total - 1e-15:
        raise ValueError(
            f"admissibility violated: min positive eps^2 {sq[pos].min():.6g} < "
            f"(2/T) * sum eps^2 = {(2.0 / T) * total:.6g}"
        )
    m = float(eps.max())
    if 2.0 * m > 1.0 + 1e-15:
        raise ValueError(f"losses would exceed [0,1]: 2 * max eps = {2 * m:.6g} > 1")
    delta = np.where(pos, np.sqrt(total) / np.where(pos, eps, 1.0) / np.sqrt(T), 0.0)
    if (delta**2).max() > 0.5 + 1e-15:
        raise ValueError(f"validity condition delta^2 <= 1/2 violated: {(delta**2).max():.6g}")

    K = eps.size
    p = sq / total
    hidden = int(gen.choice(K, p=p))
    # Each cell independently takes m + eps or m - eps; arm `hidden` leans low.
    down_prob = np.full(K, 0.5)
    down_prob[hidden] = (1.0 + delta[hidden]) / 2.0
    signs = np.where(gen.random((T, K)) < down_prob[None, :], -1.0, 1.0)
    losses = m + signs * eps[None, :]

    env = EnvironmentInstance(
        kind="bandit_lower",
        losses=losses,
        hidden_best=hidden,
        side_m=np.full((T, K), m),
        side_eps=_tile(eps, T),
        params={"eps": eps.tolist(), "delta": delta.tolist()},
    )
    env.validate_or_raise()
    return env


def fullinfo_lower_bound_env(eps, T: int, rng) -> EnvironmentInstance:
    """All arms but the widest-interval one are constant; that arm's mean is
    nudged up or down by a coin z, and the comparator arm follows z."""
    gen = _as_generator(rng)
    eps = np.asarray(eps, dtype=float)
    if eps.size < 2 or np.any(eps < 0):
        raise ValueError("need at least 2 arms with nonnegative radii")
    i_max = int(np.argmax(eps))
    e = float(eps[i_max])
    if e > 0.5 + 1e-15:
        raise ValueError(f"max radius {e} > 1/2 would push losses outside [0,1]")
    if T < 1:
        raise ValueError("need T >= 1")
    delta = 1.0 / (2.0 * np.sqrt(T))
    z = 1 if gen.random() < 0.5 else -1

    K = eps.size
    losses = np.full((T, K), e)
    high = gen.random(T) < (1.0 - z * delta) / 2.0
    losses[:, i_max] = np.where(high, 2.0 * e, 0.0)

    env = EnvironmentInstance(
        kind="fullinfo_lower",
        losses=losses,
        hidden_best=0 if z == 1 else 1,
        side_m=np.full((T, K), e),
        side_eps=_tile(eps, T),
        full_info=True,
        params={"eps": eps.tolist(), "delta": delta, "z": z, "i_max": i_max},
    )
    env.validate_or_raise()
    return env


def octopus_adversary(k: int, d: int, C: float, T: int, rng) -> EnvironmentInstance:
    """Octopus-graph adversary: a ramp of loss increments along each tentacle,
    flipped by a fresh sign each round, with one secretly favored far endpoint.

    The center is pinned at 1/2 and serves as the anchored arm. The ramp
    amplitude is sized so the pre-perturbation smoothness stays at most half the
    budget, leaving slack for the endpoint bias.
    """
    if C <= 0:
        raise ValueError(f"budget must be positive, got {C}")
    gen = _as_generator(rng)
    g = octopus(k, d)
    view = laplacian(g)

    b = min(0.5, C * d / (2.0 * np.sqrt(k)))
    pos = np.arange(1, d + 1)  # position along a tentacle, 1-based
    ramp = b * np.minimum(1.0, 2.0 * pos / d)
    profile = np.zeros(k)
    for root in range(0, k - 1, d):
        profile[root:root + d] = ramp
    endpoints = octopus_endpoints(k, d)
    favored = int(gen.choice(endpoints))
    bias = min(b, np.sqrt(k / T)) / 2.0

    signs = np.where(gen.random(T) < 0.5, -1.0, 1.0)
    losses = 0.5 + signs[:, None] * profile[None, :]
    losses[:, favored] -= bias
    raw = losses
    losses = np.clip(raw, 0.0, 1.0)
    clips = int(np.sum(raw != losses))

    env = EnvironmentInstance(
        kind="octopus",
        losses=losses,
        hidden_best=favored,
        anchors=np.full(T, 0.5),
        anchored_arms=np.full(T, k - 1, dtype=int),
        graph=g,
        budget=float(C),
        clip_events=clips,
        params={"k": k, "d": d, "C": C, "amplitude": b, "bias": bias},
    )
    env._view = view
    # The construction keeps the pre-bias quadratic form at most C^2/2; a
    # budget failure here is a bug, not bad input.
    env.validate_or_raise()
    return env


def smooth_random_env(g: GraphSpec, C: float, T: int, rng, anchor_mode: str = "min-loss"
                      ) -> EnvironmentInstance:
    """Random Laplacian-smooth losses: a drifting common level plus a
    perturbation along nonconstant Laplacian eigenvectors, scaled under budget."""
    if C < 0:
        raise ValueError(f"budget must be nonnegative, got {C}")
    gen = _as_generator(rng)
    view = laplacian(g)
    if not view.connected:
        raise ValueError("smooth environment needs a connected graph")
    K = g.n_nodes
    L = view.matrix
    lam, vecs = np.linalg.eigh(L)
    nonconst = lam > 1e-9 * max(lam.max(), 1.0)
    V, lam_nc = vecs[:, nonconst], lam[nonconst]

    losses = np.empty((T, K))
    for t in range(T):
        u = gen.uniform(0.25, 0.75)
        if C == 0 or not nonconst.any():
            losses[t] = u
            continue
        direction = gen.standard_normal(lam_nc.size)
        energy = np.sqrt(np.sum(direction**2 * lam_nc))
        coeff = direction * (0.9 * C * gen.random()) / energy
        pert = V @ coeff
        vec = np.clip(u + pert, 0.0, 1.0)
        while smoothness(vec, view) > C**2:
            # Clipping can only have been the culprit; shrink and retry
            # (zero perturbation trivially passes).
            pert *= 0.9
            vec = np.clip(u + pert, 0.0, 1.0)
        losses[t] = vec

    if anchor_mode == "min-loss":
        arms = np.argmin(losses, axis=1)
    elif anchor_mode == "any-arm":
        arms = np.full(T, int(gen.integers(K)), dtype=int)
    else:
        raise ValueError(f"unknown anchor mode {anchor_mode!r}")
    anchors = losses[np.arange(T), arms]

    env = EnvironmentInstance(
        kind="smooth_random",
        losses=losses,
        anchors=anchors,
        anchored_arms=arms,
        graph=g,
        budget=float(C),
        full_info=True,
        params={"C": C, "anchor_mode": anchor_mode},
    )
    env._view = view
    env.validate_or_raise()
    return env


def oscillating_env(K: int, T: int, delta: float | None, rng) -> EnvironmentInstance:
    """All arms share one Gaussian level per round, clipped to [0,1]; one hidden
    arm sits a hair below the rest. The shared level oscillates unpredictably,
    so bandit feedback alone cannot localize the hidden arm."""
    gen = _as_generator(rng)
    if delta is None:
        delta = float(np.sqrt(K / T))
    if not (0.0 < delta < 1.0):
        raise ValueError(f"gap must be in (0, 1), got {delta}")
    star = int(gen.integers(K))
    z = gen.standard_normal(T)
    losses = np.clip(z[:, None] - delta * (np.arange(K) == star)[None, :], 0.0, 1.0)
    anchor_arm = 0 if star != 0 else 1

    env = EnvironmentInstance(
        kind="oscillating",
        losses=losses,
        hidden_best=star,
        anchors=losses[:, anchor_arm].copy(),
        anchored_arms=np.full(T, anchor_arm, dtype=int),
        range_cap=delta,
        params={"delta": delta},
    )
    env.validate_or_raise()
    return env


def interval_random_env(K: int, T: int, eps: float, rng,
                        m_low: float = 0.4, m_high: float = 0.6,
                        per_round_centers: bool = True) -> EnvironmentInstance:
    """Interval side information with uniform random centers and a common
    radius; losses land uniformly inside their intervals.

    Centers are redrawn every round by default; with ``per_round_centers``
    false they are drawn once per instance, giving a fixed hidden best arm the
    learner must locate through intervals of width ~ eps.
    """
    gen = _as_generator(rng)
    if eps < 0 or m_low - eps < -1e-12 or m_high + eps > 1 + 1e-12:
        raise ValueError(f"intervals [{m_low}-{eps}, {m_high}+{eps}] leave [0,1]")
    if per_round_centers:
        centers = gen.uniform(m_low, m_high, size=(T, K))
    else:
        centers = np.tile(gen.uniform(m_low, m_high, size=K), (T, 1))
    losses = centers + eps * gen.uniform(-1.0, 1.0, size=(T, K))

    env = EnvironmentInstance(
        kind="interval_random",
        losses=losses,
        side_m=centers,
        side_eps=np.full((T, K), float(eps)),
        full_info=True,
        params={"eps": eps, "m_low": m_low, "m_high": m_high,
                "per_round_centers": per_round_centers},
    )
    env.validate_or_raise()
    return env


def multicomponent_smooth_env(component_sizes, C: float, T: int, rng) -> EnvironmentInstance:
    """Disconnected graph of path components, each with its own drifting level
    and anchor (the loss of the component's first node), smooth under one
    shared budget and truthful for the per-component interval radii."""
    if C < 0:
        raise ValueError(f"budget must be nonnegative, got {C}")
    gen = _as_generator(rng)
    sizes = [int(s) for s in component_sizes]
    if any(s < 2 for s in sizes):
        raise ValueError("every component needs at least 2 nodes (singletons have no radius)")
    K = sum(sizes)
    edges = []
    starts = []
    offset = 0
    for s in sizes:
        starts.append(offset)
        edges += [(offset + i, offset + i + 1) for i in range(s - 1)]
        offset += s
    g = GraphSpec(K, tuple(edges))
    n_comp = len(sizes)

    # Per-component interval radius C / sqrt(lambda_2 of the component path).
    radii = []
    for s in sizes:
        sub = laplacian(GraphSpec(s, tuple((i, i + 1) for i in range(s - 1))))
        radii.append(C / np.sqrt(sub.eigenvalues[1]) if C > 0 else 0.0)

    losses = np.empty((T, K))
    comp_anchors = np.empty((T, n_comp))
    share = C**2 / n_comp if n_comp else 0.0
    view = laplacian(g)
    for t in range(T):
        for s_idx, (s, start) in enumerate(zip(sizes, starts)):
            u = gen.uniform(0.25, 0.75)
            rho = gen.standard_normal(s)
            rho -= rho[0]  # the first node is the component's anchor
            scale = 1.0
            seg = GraphSpec(s, tuple((i, i + 1) for i in range(s - 1)))
            q = sum((rho[i] - rho[j]) ** 2 for (i, j) in seg.edges)
            if q > 0 and share > 0:
                scale = min(scale, np.sqrt(0.9 * share / q))
            amax = np.abs(rho).max()
            if amax > 0:
                scale = min(scale, 0.2 / amax)
                if radii[s_idx] > 0:
                    scale = min(scale, 0.99 * radii[s_idx] / amax)
                else:
                    scale = 0.0
            rho = rho * scale
            losses[t, start:start + s] = u + rho
            comp_anchors[t, s_idx] = u

    labels = view.components
    # Component labels follow construction order for a path-block layout.
    side_m = comp_anchors[:, labels]
    side_eps = np.tile(np.asarray(radii)[labels], (T, 1))

    env = EnvironmentInstance(
        kind="multicomponent_smooth",
        losses=losses,
        side_m=side_m,
        side_eps=side_eps,
        graph=g,
        budget=float(C),
        component_anchors=comp_anchors,
        params={"component_sizes": sizes, "C": C},
    )
    env._view = view
    env.validate_or_raise()
    return env


ENVIRONMENT_KINDS = {
    "bandit_lower": bandit_lower_bound_env,
    "fullinfo_lower": fullinfo_lower_bound_env,
    "octopus": octopus_adversary,
    "smooth_random": smooth_random_env,
    "oscillating": oscillating_env,
    "interval_random": interval_random_env,
    "multicomponent_smooth": multicomponent_smooth_env,
}
