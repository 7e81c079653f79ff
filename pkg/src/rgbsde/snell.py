"""Snell envelopes and optimal stopping on finite lattices.

A :class:`Lattice` is a leveled directed graph with transition
probabilities; trees (unique parents) additionally support path-cumulative
quantities.  The module provides

* ``snell_envelope`` -- smallest supermartingale dominating a reward,
* ``doob_meyer`` -- its decomposition into a martingale minus a
  predictable nondecreasing compensator,
* ``optimal_stop`` -- the earliest optimal rule and its exact value,
* ``reflected_from_snell`` -- the classical reduction of a reflected
  equation with path-independent drivers: accumulate the running driver
  terms into a reward, take the envelope, subtract the accumulation back,
* ``enumerate_stopping_rules`` / ``rule_value`` -- exhaustive oracles for
  small trees,
* JSON import/export of lattices.

Everything here is exact arithmetic on the lattice (no Monte Carlo); the
regression solvers are tested against these routines.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional, Sequence

import numpy as np

Array = np.ndarray

__all__ = [
    "LatticeError",
    "LatticeNode",
    "Lattice",
    "SnellResult",
    "DoobMeyer",
    "OptimalStop",
    "ReflectedLatticeSolution",
    "snell_envelope",
    "doob_meyer",
    "optimal_stop",
    "reflected_from_snell",
    "enumerate_stopping_rules",
    "count_stopping_rules",
    "rule_value",
    "random_tree",
    "binomial_tree",
    "lattice_to_json",
    "lattice_from_json",
]

_PROB_TOL = 1e-12


class LatticeError(ValueError):
    """Structural problem with a lattice."""


@dataclass
class LatticeNode:
    """One lattice node.

    ``dt`` and ``dG`` are the time and local-time increments of the step
    *leaving* this node; they are ignored on terminal nodes.  ``F`` is the
    stopping reward used by the envelope (may be NaN until assigned).
    """

    id: int
    level: int
    state: Array
    F: float = np.nan
    dt: float = 0.0
    dG: float = 0.0
    children: list[tuple[int, float]] = field(default_factory=list)


@dataclass
class Lattice:
    """Leveled lattice; ``nodes[i].id == i`` and children live one level down."""

    levels: int
    nodes: list[LatticeNode]

    def __post_init__(self):
        self.validate()

    # -- structure ---------------------------------------------------------

    def validate(self) -> None:
        if self.levels < 1:
            raise LatticeError("lattice needs at least one level")
        seen_levels = set()
        for i, node in enumerate(self.nodes):
            if node.id != i:
                raise LatticeError(f"node at position {i} has id {node.id}")
            if not 0 <= node.level < self.levels:
                raise LatticeError(f"node {i} has level {node.level} outside [0, {self.levels})")
            seen_levels.add(node.level)
            node.state = np.atleast_1d(np.asarray(node.state, dtype=float))
            if node.level == self.levels - 1:
                if node.children:
                    raise LatticeError(f"terminal node {i} has children")
                continue
            if not node.children:
                raise LatticeError(f"non-terminal node {i} has no children")
            total = 0.0
            for cid, p in node.children:
                if not 0 <= cid < len(self.nodes):
                    raise LatticeError(f"node {i} references unknown child {cid}")
                if self.nodes[cid].level != node.level + 1:
                    raise LatticeError(f"child {cid} of node {i} is not one level down")
                if p < 0:
                    raise LatticeError(f"negative transition probability on node {i}")
                total += p
            if abs(total - 1.0) > _PROB_TOL:
                raise LatticeError(
                    f"transition probabilities of node {i} sum to {total!r}, not 1"
                )
        if seen_levels != set(range(self.levels)):
            raise LatticeError("some levels are empty")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def level_ids(self, level: int) -> list[int]:
        return [n.id for n in self.nodes if n.level == level]

    def parent_ids(self) -> list[list[int]]:
        parents: list[list[int]] = [[] for _ in self.nodes]
        for node in self.nodes:
            for cid, _ in node.children:
                parents[cid].append(node.id)
        return parents

    @property
    def is_tree(self) -> bool:
        parents = self.parent_ids()
        roots = [n.id for n in self.nodes if not parents[n.id]]
        return len(roots) == 1 and all(len(p) == 1 for i, p in enumerate(parents) if i != roots[0])

    def root_id(self) -> int:
        parents = self.parent_ids()
        roots = [n.id for n in self.nodes if not parents[n.id]]
        if len(roots) != 1:
            raise LatticeError(f"expected a unique root, found {len(roots)}")
        return roots[0]

    def require_tree(self, what: str) -> None:
        if not self.is_tree:
            raise LatticeError(f"{what} needs a tree (unique parents)")

    # -- path-cumulative helpers (trees) ------------------------------------

    def reach_probabilities(self) -> Array:
        """Probability of visiting each node, root = 1 (trees)."""
        self.require_tree("reach probabilities")
        prob = np.zeros(self.n_nodes)
        prob[self.root_id()] = 1.0
        for node in sorted(self.nodes, key=lambda n: n.level):
            for cid, p in node.children:
                prob[cid] += prob[node.id] * p
        return prob

    def node_times(self) -> Array:
        """Time of each node: cumulative dt along the ancestor path (trees)."""
        self.require_tree("node times")
        t = np.zeros(self.n_nodes)
        for node in sorted(self.nodes, key=lambda n: n.level):
            for cid, _ in node.children:
                t[cid] = t[node.id] + node.dt
        return t

    def paths(self) -> list[tuple[list[int], float]]:
        """All root-to-leaf node-id paths with probabilities (trees)."""
        self.require_tree("path expansion")
        out: list[tuple[list[int], float]] = []

        def walk(nid: int, acc: list[int], p: float) -> None:
            acc = acc + [nid]
            node = self.nodes[nid]
            if not node.children:
                out.append((acc, p))
                return
            for cid, pc in node.children:
                walk(cid, acc, p * pc)

        walk(self.root_id(), [], 1.0)
        return out

    def states(self) -> Array:
        return np.stack([n.state for n in self.nodes])

    def rewards(self) -> Array:
        return np.array([n.F for n in self.nodes], dtype=float)


# ---------------------------------------------------------------------------
# envelope, decomposition, stopping
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SnellResult:
    """Envelope values per node.

    ``S`` dominates the reward ``F``; ``cont`` is the one-step conditional
    expectation E[S next | node] (NaN on terminal nodes); ``dK`` = S - cont
    >= 0 is the compensator increment; ``stop`` flags nodes with S == F.
    """

    F: Array
    S: Array
    cont: Array
    dK: Array
    stop: Array


def snell_envelope(lattice: Lattice, rewards: Optional[Array] = None) -> SnellResult:
    """Backward recursion S = max(F, E[S next]) over the lattice."""
    F = lattice.rewards() if rewards is None else np.asarray(rewards, dtype=float)
    if F.shape != (lattice.n_nodes,):
        raise LatticeError("rewards must give one value per node")
    if np.any(np.isnan(F)):
        raise LatticeError("rewards contain NaN; assign F before taking the envelope")
    S = np.empty(lattice.n_nodes)
    cont = np.full(lattice.n_nodes, np.nan)
    dK = np.zeros(lattice.n_nodes)
    for level in range(lattice.levels - 1, -1, -1):
        for nid in lattice.level_ids(level):
            node = lattice.nodes[nid]
            if not node.children:
                S[nid] = F[nid]
                continue
            e = sum(p * S[cid] for cid, p in node.children)
            cont[nid] = e
            S[nid] = max(F[nid], e)
            dK[nid] = S[nid] - e
    stop = S <= F + 0.0  # S >= F always; equality marks stopping nodes
    stop = np.isclose(S, F, rtol=0.0, atol=0.0) | (S == F)
    return SnellResult(F=F, S=S, cont=cont, dK=dK, stop=stop)


@dataclass(frozen=True)
class DoobMeyer:
    """Decomposition S = M - K with K nondecreasing, K(root) = 0."""

    K: Array
    M: Array

    def martingale_defect(self, lattice: Lattice) -> float:
        worst = 0.0
        for node in lattice.nodes:
            if not node.children:
                continue
            e = sum(p * self.M[cid] for cid, p in node.children)
            worst = max(worst, abs(e - self.M[node.id]))
        return worst


def doob_meyer(lattice: Lattice, result: SnellResult) -> DoobMeyer:
    """Path-cumulative compensator K and martingale M = S + K (trees).

    K at a node is the sum of dK over strict ancestors, so K(root) = 0 and
    K is predictable: the increment charged between a node and its children
    is known at the node.
    """
    lattice.require_tree("Doob-Meyer decomposition")
    K = np.zeros(lattice.n_nodes)
    for node in sorted(lattice.nodes, key=lambda n: n.level):
        for cid, _ in node.children:
            K[cid] = K[node.id] + result.dK[node.id]
    return DoobMeyer(K=K, M=result.S + K)


@dataclass(frozen=True)
class OptimalStop:
    """Earliest optimal rule: stop at the first node where S == F."""

    stop_nodes: frozenset[int]
    value: float
    by_path: list[tuple[tuple[int, ...], int, float]]  # (path, stop node, prob)


def optimal_stop(lattice: Lattice, result: SnellResult) -> OptimalStop:
    lattice.require_tree("optimal stopping rule extraction")
    stops: set[int] = set()
    by_path: list[tuple[tuple[int, ...], int, float]] = []
    value = 0.0
    for path, prob in lattice.paths():
        stop_at = path[-1]
        for nid in path:
            if result.stop[nid]:
                stop_at = nid
                break
        stops.add(stop_at)
        by_path.append((tuple(path), stop_at, prob))
        value += prob * result.F[stop_at]
    return OptimalStop(stop_nodes=frozenset(stops), value=value, by_path=by_path)


# ---------------------------------------------------------------------------
# reflected equations with path-independent drivers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReflectedLatticeSolution:
    """Reflected solution recovered from a Snell envelope.

    ``A`` is the accumulated driver integral (sum of f dt + g dG over
    strict ancestors), ``F`` the assembled reward, ``Y = S(F) - A``, and
    ``K`` the cumulative compensator.
    """

    Y: Array
    dK: Array
    K: Array
    A: Array
    F: Array
    envelope: SnellResult


def reflected_from_snell(
    lattice: Lattice,
    f_vals: Array,
    g_vals: Array,
    obstacle_vals: Array,
    xi_vals: Array,
) -> ReflectedLatticeSolution:
    """Solve a reflected equation with (y, z)-independent drivers exactly.

    Builds the cumulative reward F = A + obstacle (terminal: A + xi) where
    A accumulates f dt + g dG along each path, takes the Snell envelope,
    and converts back: Y = S(F) - A.  Requires a tree so that A is
    well-defined per node.
    """
    lattice.require_tree("reflected-from-envelope reduction")
    n = lattice.n_nodes
    f_vals = np.asarray(f_vals, dtype=float)
    g_vals = np.asarray(g_vals, dtype=float)
    obstacle_vals = np.asarray(obstacle_vals, dtype=float)
    xi_vals = np.asarray(xi_vals, dtype=float)
    for arr, what in ((f_vals, "f"), (g_vals, "g"), (obstacle_vals, "obstacle"), (xi_vals, "xi")):
        if arr.shape != (n,):
            raise LatticeError(f"{what} values must give one value per node")

    A = np.zeros(n)
    for node in sorted(lattice.nodes, key=lambda nd: nd.level):
        inc = f_vals[node.id] * node.dt + g_vals[node.id] * node.dG
        for cid, _ in node.children:
            A[cid] = A[node.id] + inc
    terminal = np.array([not nd.children for nd in lattice.nodes])
    F = A + np.where(terminal, xi_vals, obstacle_vals)
    env = snell_envelope(lattice, F)
    Y = env.S - A
    dm = doob_meyer(lattice, env)
    return ReflectedLatticeSolution(Y=Y, dK=env.dK, K=dm.K, A=A, F=F, envelope=env)


# ---------------------------------------------------------------------------
# exhaustive stopping oracles
# ---------------------------------------------------------------------------


def count_stopping_rules(lattice: Lattice, node: Optional[int] = None) -> int:
    lattice.require_tree("rule counting")
    nid = lattice.root_id() if node is None else node
    kids = lattice.nodes[nid].children
    if not kids:
        return 1
    prod = 1
    for cid, _ in kids:
        prod *= count_stopping_rules(lattice, cid)
    return 1 + prod


def enumerate_stopping_rules(lattice: Lattice, max_rules: int = 100_000) -> list[frozenset[int]]:
    """All adapted stopping rules, as antichains of stop nodes.

    A rule stops every root-to-leaf path exactly once; terminal nodes stop
    by default.  Raises when the tree admits more than ``max_rules`` rules.
    """
    lattice.require_tree("rule enumeration")
    total = count_stopping_rules(lattice)
    if total > max_rules:
        raise LatticeError(f"tree admits {total} stopping rules, above cap {max_rules}")

    def rules_at(nid: int) -> list[frozenset[int]]:
        kids = lattice.nodes[nid].children
        if not kids:
            return [frozenset([nid])]
        out = [frozenset([nid])]
        for combo in itertools.product(*(rules_at(cid) for cid, _ in kids)):
            out.append(frozenset().union(*combo))
        return out

    return rules_at(lattice.root_id())


def rule_value(lattice: Lattice, rule: frozenset[int], rewards: Optional[Array] = None) -> float:
    """Exact expected reward of stopping at the given antichain."""
    F = lattice.rewards() if rewards is None else np.asarray(rewards, dtype=float)
    reach = lattice.reach_probabilities()
    covered = 0.0
    value = 0.0
    for nid in rule:
        value += reach[nid] * F[nid]
        covered += reach[nid]
    if abs(covered - 1.0) > 1e-9:
        raise LatticeError(f"rule covers probability {covered}, not 1 (not an antichain?)")
    return value


# ---------------------------------------------------------------------------
# builders
# ---------------------------------------------------------------------------


def random_tree(
    levels: int,
    max_children: int,
    rng: np.random.Generator,
    dt_range: tuple[float, float] = (0.1, 0.5),
    dg_prob: float = 0.4,
    dg_range: tuple[float, float] = (0.0, 0.3),
    state_step: float = 0.5,
    reward_scale: Optional[float] = 1.0,
    max_rules: Optional[int] = None,
) -> Lattice:
    """Random non-recombining tree with random increments.

    States follow a random walk from 0; each non-terminal node draws 1 to
    ``max_children`` children with a random probability vector, a time
    step from ``dt_range``, and (with probability ``dg_prob``) a positive
    local-time increment.  When ``reward_scale`` is not None, rewards are
    drawn i.i.d. normal with that scale.  With ``max_rules`` set, the
    sampler redraws child counts until the stopping-rule count stays
    within the cap.
    """
    while True:
        nodes: list[LatticeNode] = []
        frontier: list[int] = []
        root = LatticeNode(id=0, level=0, state=np.array([0.0]))
        nodes.append(root)
        frontier = [0]
        for level in range(1, levels):
            nxt: list[int] = []
            for nid in frontier:
                parent = nodes[nid]
                k = int(rng.integers(1, max_children + 1))
                probs = rng.dirichlet(np.ones(k))
                parent.dt = float(rng.uniform(*dt_range))
                parent.dG = (
                    float(rng.uniform(*dg_range)) if rng.uniform() < dg_prob else 0.0
                )
                for j in range(k):
                    cid = len(nodes)
                    state = parent.state + rng.normal(scale=state_step, size=1)
                    nodes.append(LatticeNode(id=cid, level=level, state=state))
                    parent.children.append((cid, float(probs[j])))
                    nxt.append(cid)
            frontier = nxt
        if reward_scale is not None:
            for node in nodes:
                node.F = float(rng.normal(scale=reward_scale))
        lattice = Lattice(levels=levels, nodes=nodes)
        if max_rules is None or count_stopping_rules(lattice) <= max_rules:
            return lattice


def binomial_tree(
    levels: int,
    x0: float = 1.0,
    up: float = 1.1,
    down: Optional[float] = None,
    p_up: float = 0.5,
    dt: float = 0.1,
) -> Lattice:
    """Multiplicative binomial tree (non-recombining storage).

    ``down`` defaults to 1/up.  States are scalars; rewards are left
    unassigned (NaN) for the caller to fill.
    """
    if down is None:
        down = 1.0 / up
    nodes: list[LatticeNode] = [LatticeNode(id=0, level=0, state=np.array([x0]), dt=dt)]
    frontier = [0]
    for level in range(1, levels):
        nxt = []
        for nid in frontier:
            parent = nodes[nid]
            parent.dt = dt
            for factor, p in ((up, p_up), (down, 1.0 - p_up)):
                cid = len(nodes)
                nodes.append(
                    LatticeNode(id=cid, level=level, state=parent.state * factor, dt=dt)
                )
                parent.children.append((cid, p))
                nxt.append(cid)
        frontier = nxt
    for node in nodes:
        node.F = 0.0
    return Lattice(levels=levels, nodes=nodes)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def lattice_to_json(lattice: Lattice, fh: Optional[IO[str]] = None) -> str:
    doc = {
        "levels": lattice.levels,
        "nodes": [
            {
                "id": n.id,
                "level": n.level,
                "state": [float(s) for s in np.atleast_1d(n.state)],
                "F": None if np.isnan(n.F) else float(n.F),
                "dt": float(n.dt),
                "dG": float(n.dG),
                "children": [{"id": cid, "p": float(p)} for cid, p in n.children],
            }
            for n in lattice.nodes
        ],
    }
    text = json.dumps(doc, indent=1, sort_keys=True)
    if fh is not None:
        fh.write(text)
    return text


def lattice_from_json(source: str | IO[str]) -> Lattice:
    doc = json.loads(source if isinstance(source, str) else source.read())
    try:
        nodes = [
            LatticeNode(
                id=int(n["id"]),
                level=int(n["level"]),
                state=np.asarray(n["state"], dtype=float),
                F=np.nan if n.get("F") is None else float(n["F"]),
                dt=float(n.get("dt", 0.0)),
                dG=float(n.get("dG", 0.0)),
                children=[(int(c["id"]), float(c["p"])) for c in n.get("children", [])],
            )
            for n in doc["nodes"]
        ]
        nodes.sort(key=lambda n: n.id)
        return Lattice(levels=int(doc["levels"]), nodes=nodes)
    except (KeyError, TypeError) as exc:
        raise LatticeError(f"malformed lattice document: {exc}") from exc
