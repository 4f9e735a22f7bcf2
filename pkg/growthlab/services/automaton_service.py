"""Cone-type automaton over the shortlex geodesic tree, and its spectral radius.

The automaton is heuristic: cone types are compared only to a finite depth, so
stabilization is never certified. It is validated against exact BFS sphere
counts, and any disagreement is a construction failure.
"""
import logging
from typing import Dict, List, Tuple

import numpy as np
from scipy.sparse import csr_matrix

from ..constants import DEFAULT_CAP
from ..dto import ConeAutomaton
from ..exceptions import CapExceededException, ConstructionException, ValidationException
from ..models import IDENTITY, GeneratingSet, Word
from ..word_service import multiply, require_non_empty, symmetrize

logger = logging.getLogger(__name__)

SPECTRAL_TOLERANCE = 1e-12
MAX_POWER_ITERATIONS = 200000


def geodesic_tree(S: GeneratingSet, radius: int, cap: int = DEFAULT_CAP) -> Tuple[List[List[Word]], Dict[Word, List[Tuple[int, Word]]]]:
    """Levels in shortlex order and tree children (letter index, child).

    Visiting parents in rank order and letters in index order gives every
    element its shortlex-least geodesic as tree path.
    """
    require_non_empty(S, "geodesic_tree")
    model = S.model
    letters = symmetrize(S).elements
    levels: List[List[Word]] = [[IDENTITY]]
    level_of: Dict[Word, int] = {IDENTITY: 0}
    children: Dict[Word, List[Tuple[int, Word]]] = {}
    for n in range(1, radius + 1):
        nxt: List[Word] = []
        for g in levels[-1]:
            kids: List[Tuple[int, Word]] = []
            for idx, s in enumerate(letters):
                h = multiply(g, s, model)
                if h not in level_of:
                    level_of[h] = n
                    nxt.append(h)
                    kids.append((idx, h))
            children[g] = kids
        if len(level_of) > cap:
            raise CapExceededException(f"geodesic tree of radius {radius} exceeds the cap", cap)
        levels.append(nxt)
    return levels, children


def _signatures(levels: List[List[Word]], children: Dict[Word, List[Tuple[int, Word]]], depth: int) -> Dict[Word, int]:
    """Interned signature of the tree cone of each element to the given depth."""
    radius = len(levels) - 1
    sig: Dict[Word, int] = {}
    for n in range(radius + 1):
        for g in levels[n]:
            sig[g] = 0
    for d in range(1, depth + 1):
        table: Dict[tuple, int] = {}
        nxt: Dict[Word, int] = {}
        # 깊이 d의 서명은 radius - d 이하 층에서만 정확하다
        for n in range(radius - d + 1):
            for g in levels[n]:
                key = tuple((idx, sig[h]) for idx, h in children.get(g, ()))
                nxt[g] = table.setdefault(key, len(table) + 1)
        sig = nxt
    return sig


def cone_automaton(S: GeneratingSet, cutoff_radius: int, validate_depth: int = 12, cap: int = DEFAULT_CAP) -> ConeAutomaton:
    if cutoff_radius < 2:
        raise ValidationException("cutoff_radius must be >= 2")
    radius = max(2 * cutoff_radius + 2, validate_depth)
    levels, children = geodesic_tree(S, radius, cap)
    sig = _signatures(levels, children, cutoff_radius)

    state_of: Dict[int, int] = {}
    for n in range(1, cutoff_radius + 2):
        for g in levels[n]:
            state_of.setdefault(sig[g], len(state_of))

    transitions: Dict[int, List[int]] = {}
    for n in range(1, cutoff_radius + 2):
        for g in levels[n]:
            state = state_of[sig[g]]
            succ = []
            for _, h in children.get(g, ()):
                if sig[h] not in state_of:
                    raise ConstructionException(
                        "cone-automaton", f"cone types did not close at cutoff {cutoff_radius}; use a deeper cutoff"
                    )
                succ.append(state_of[sig[h]])
            known = transitions.setdefault(state, succ)
            if known != succ:
                raise ConstructionException(
                    "cone-automaton", f"inconsistent cone type at cutoff {cutoff_radius}; use a deeper cutoff"
                )

    start = [state_of[sig[g]] for _, g in children.get(IDENTITY, ())]
    automaton = ConeAutomaton(
        states=len(state_of),
        transitions=[transitions.get(i, []) for i in range(len(state_of))],
        start_successors=start,
        cutoff_radius=cutoff_radius,
        validated_depth=validate_depth,
        certified=False,
    )
    bfs_spheres = [len(level) for level in levels]
    counted = sphere_counts(automaton, validate_depth)
    for n in range(validate_depth + 1):
        if counted[n] != bfs_spheres[n]:
            raise ConstructionException(
                "cone-automaton", f"path count {counted[n]} != sphere {bfs_spheres[n]} at n={n}"
            )
    logger.info(f"[AUTOMATON] model={S.model.name} states={automaton.states} cutoff={cutoff_radius} validated={validate_depth}")
    return automaton


def transition_matrix(automaton: ConeAutomaton) -> csr_matrix:
    rows: List[int] = []
    cols: List[int] = []
    for i, succ in enumerate(automaton.transitions):
        for j in succ:
            rows.append(i)
            cols.append(j)
    data = np.ones(len(rows), dtype=float)
    size = automaton.states
    # 중복 (i, j)는 합산되어 다중 간선이 된다
    return csr_matrix((data, (rows, cols)), shape=(size, size))


def sphere_counts(automaton: ConeAutomaton, depth: int) -> List[int]:
    counts = [1]
    vector = [0] * automaton.states
    for j in automaton.start_successors:
        vector[j] += 1
    for _ in range(1, depth + 1):
        counts.append(sum(vector))
        nxt = [0] * automaton.states
        for i, c in enumerate(vector):
            if c:
                for j in automaton.transitions[i]:
                    nxt[j] += c
        vector = nxt
    return counts


def spectral_radius(automaton: ConeAutomaton) -> float:
    """Power iteration on A + I (aperiodic, same Perron vector), then subtract 1."""
    if automaton.states == 0:
        return 0.0
    A = transition_matrix(automaton)
    x = np.ones(automaton.states, dtype=float) / automaton.states
    estimate = 0.0
    for iteration in range(MAX_POWER_ITERATIONS):
        y = A.T @ x + x
        norm = float(np.abs(y).sum())
        if norm == 0.0:
            return 0.0
        y /= norm
        if abs(norm - estimate) <= SPECTRAL_TOLERANCE * max(norm, 1.0):
            estimate = norm
            break
        estimate = norm
        x = y
    else:
        logger.warning(f"[AUTOMATON] power iteration did not converge in {MAX_POWER_ITERATIONS} steps")
    rho = estimate - 1.0
    eig = float(np.max(np.abs(np.linalg.eigvals(A.toarray())))) if automaton.states <= 2000 else rho
    if abs(eig - rho) > 1e-6 * max(1.0, eig):
        logger.warning(f"[AUTOMATON] power iteration {rho:.12g} disagrees with eigvals {eig:.12g}")
    logger.info(f"[AUTOMATON] spectral radius={rho:.12g} iterations={iteration + 1}")
    return max(rho, 0.0)

