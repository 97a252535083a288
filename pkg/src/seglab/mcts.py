"""Monte Carlo tree search over joint pursuer moves.

The search treats the evader rule as part of the environment: a node is a
full game state, an edge is a joint pursuer move, and applying an edge also
lets the evaders respond.  Leaf evaluation is pluggable; priors get mixed
with Dirichlet noise at expansion so even a flat evaluator explores.
Values are from the pursuer's point of view: +1 for surviving the horizon,
-1 for losing the evader.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from .strategies import GameContext, GameState, JointAction, Policy

Evaluator = Callable[[GameState], tuple[np.ndarray, float]]


class GameDynamics(Protocol):
    def actions(self, state) -> list: ...
    def step(self, state, action): ...
    def is_terminal(self, state) -> bool: ...
    def terminal_value(self, state) -> float: ...
    def key(self, state): ...


@dataclass
class SurveillanceDynamics:
    """Adapter giving the search a clean view of the pursuit game."""

    ctx: GameContext
    k_max: int

    def actions(self, state: GameState) -> list[JointAction]:
        return self.ctx.joint_pursuer_actions(state.pursuers)

    def step(self, state: GameState, action: JointAction) -> GameState:
        return self.ctx.transition(state, action)

    def is_terminal(self, state: GameState) -> bool:
        return state.turn >= self.k_max or self.ctx.is_end_game(state)

    def terminal_value(self, state: GameState) -> float:
        # losing the evader dominates: check occlusion before the horizon
        return -1.0 if self.ctx.is_end_game(state) else 1.0

    def key(self, state: GameState):
        return (state.pursuers, state.evaders, state.turn)


@dataclass
class SearchNode:
    actions: list
    prior: np.ndarray
    visit_count: np.ndarray
    value_sum: np.ndarray
    mean_value: np.ndarray

    @classmethod
    def fresh(cls, actions, prior) -> "SearchNode":
        n = len(actions)
        return cls(actions, np.asarray(prior, dtype=np.float64),
                   np.zeros(n), np.zeros(n), np.zeros(n))

    def select_index(self) -> int:
        total = self.visit_count.sum()
        if total == 0:
            return int(np.argmax(self.prior))
        u = self.mean_value + self.prior * np.sqrt(total) / (1.0 + self.visit_count)
        return int(np.argmax(u))


def mcts_search(dynamics: GameDynamics, root, evaluator: Evaluator,
                iterations: int, epsilon: float = 0.25, alpha: float = 0.3,
                tau: float = 1.0, rng: np.random.Generator | int | None = None,
                tree: dict | None = None, trace: list | None = None) -> Policy:
    """Run the search and return visit-count move weights for the root.

    tree, when given, receives every expanded node keyed by state (useful
    for inspection); trace, when given, collects one record per iteration
    with the leaf depth and backed-up value.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    if tau <= 0:
        raise ValueError("tau must be positive")
    if dynamics.is_terminal(root):
        raise ValueError("root state is already terminal")
    if rng is None or isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    if tree is None:
        tree = {}

    for it in range(1, iterations + 1):
        state = root
        path: list[tuple[SearchNode, int]] = []
        terminal = False
        while True:
            node = tree.get(dynamics.key(state))
            if node is None:
                break
            ai = node.select_index()
            path.append((node, ai))
            state = dynamics.step(state, node.actions[ai])
            if dynamics.is_terminal(state):
                terminal = True
                break

        if terminal:
            value = dynamics.terminal_value(state)
        else:
            actions = dynamics.actions(state)
            prior_weights, value = evaluator(state)
            prior_weights = np.asarray(prior_weights, dtype=np.float64)
            if prior_weights.size != len(actions):
                raise ValueError("evaluator weights do not match the action count")
            noise = rng.dirichlet(np.full(len(actions), alpha))
            prior = (1.0 - epsilon) * prior_weights + epsilon * noise
            tree[dynamics.key(state)] = SearchNode.fresh(actions, prior)

        for node, ai in path:
            node.visit_count[ai] += 1
            node.value_sum[ai] += value
            node.mean_value[ai] = node.value_sum[ai] / node.visit_count[ai]

        if trace is not None:
            trace.append({"iteration": it, "depth": len(path),
                          "leaf_value": float(value), "terminal": terminal})

    root_node = tree[dynamics.key(root)]
    if root_node.visit_count.sum() == 0:
        # a one-iteration search never leaves the root; fall back to its prior
        weights = root_node.prior
    else:
        weights = root_node.visit_count ** (1.0 / tau)
    return Policy(list(root_node.actions), weights)


def transition(ctx: GameContext, state: GameState, action: JointAction) -> GameState:
    """Pursuers move first, evaders answer, the turn clock ticks."""
    return ctx.transition(state, action)


def make_evaluator(kind: str, ctx: GameContext,
                   rng: np.random.Generator | int | None = None,
                   alpha: float = 0.3) -> Evaluator:
    """Leaf evaluators: the three local policies, uniform, or Dirichlet noise.

    All of them return value 0; the search's signal then comes entirely
    from terminal states found inside the tree.
    """
    from .strategies import POLICY_KINDS

    if kind in POLICY_KINDS:
        policy_fn = POLICY_KINDS[kind]

        def policy_eval(state: GameState):
            return policy_fn(ctx, state).weights, 0.0
        return policy_eval

    if kind == "uniform":
        def uniform_eval(state: GameState):
            n = len(ctx.joint_pursuer_actions(state.pursuers))
            return np.full(n, 1.0 / n), 0.0
        return uniform_eval

    if kind == "dirichlet":
        gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)

        def dirichlet_eval(state: GameState):
            n = len(ctx.joint_pursuer_actions(state.pursuers))
            return gen.dirichlet(np.full(n, alpha)), 0.0
        return dirichlet_eval

    raise ValueError(f"unknown evaluator kind {kind!r}")
