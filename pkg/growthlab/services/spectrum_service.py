"""Finite growth spectra: e-brackets over bounded families of symmetric generating sets.

Deduplication is an under-approximation of Aut(G)-equivalence: inverse-class
representatives, sorting, and elementary automorphism moves down to a local
minimum. Rows that still share a β column afterwards are merged and flagged.
"""
import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from ..constants import DEFAULT_CAP, DEFAULT_SHARDS, FLOAT_TOLERANCE
from ..dto import GrowthEstimate, GrowthTable, SpectrumRow, SpectrumTable
from ..exceptions import ConstructionException, InvariantViolation, ValidationException
from ..models import ActionConstants, FactorKind, GroupModel, Homomorphism, Word, shortlex_key
from ..space_service import SpaceModel
from ..word_service import evaluate, invert, make_generating_set, make_homomorphism, multiply, power_set_lengths
from .construction_service import ConstructionService
from .growth_service import enumerate_balls, growth_estimate

logger = logging.getLogger(__name__)

MAX_CANDIDATES = 5000
GENERATION_DEPTH = 6
PLATEAU_MOVES = 16

SetKey = Tuple[Word, ...]


class SetClass(NamedTuple):
    key: SetKey
    members: List[SetKey]


def inverse_representative(word: Word, model: GroupModel) -> Word:
    inverse = invert(word, model)
    return min(word, inverse, key=shortlex_key)


def set_key(words: Sequence[Word], model: GroupModel) -> SetKey:
    return tuple(sorted({inverse_representative(w, model) for w in words if w}, key=shortlex_key))


def _cost(key: SetKey) -> Tuple[int, Tuple]:
    return sum(len(w) for w in key), tuple(shortlex_key(w) for w in key)


def elementary_automorphisms(model: GroupModel) -> List[Homomorphism]:
    """Inversions, swaps of equal cyclic factors, transvections of free Z factors and partial conjugations."""
    layout = model.layout()
    gens = model.standard_generators()
    n = len(gens)
    moves: List[List[Word]] = []

    def images_with(updates: Dict[int, Word]) -> List[Word]:
        return [updates.get(i, gens[i]) for i in range(n)]

    for pos, factor in enumerate(layout.factors):
        if factor.kind == FactorKind.CYCLIC:
            i = factor.generators[0]
            moves.append(images_with({i: invert(gens[i], model)}))
    cyclic = [(pos, f) for pos, f in enumerate(layout.factors) if f.kind == FactorKind.CYCLIC]
    for (p1, f1), (p2, f2) in itertools.combinations(cyclic, 2):
        if f1.order == f2.order:
            i, j = f1.generators[0], f2.generators[0]
            moves.append(images_with({i: gens[j], j: gens[i]}))
    for pos, factor in enumerate(layout.factors):
        for j in range(n):
            if layout.factor_of[j] == pos:
                continue
            for x in (gens[j], invert(gens[j], model)):
                xi = invert(x, model)
                if factor.is_loop:
                    i = factor.generators[0]
                    moves.append(images_with({i: multiply(gens[i], x, model)}))
                    moves.append(images_with({i: multiply(x, gens[i], model)}))
                moves.append(
                    images_with({i: multiply(multiply(x, gens[i], model), xi, model) for i in factor.generators})
                )
    return [make_homomorphism(model, images) for images in moves]


def canonical_key(key: SetKey, model: GroupModel, moves: Sequence[Homomorphism], plateau: int = PLATEAU_MOVES) -> SetKey:
    """Local minimum of (total length, shortlex) under the moves; equal-length moves count toward the plateau."""
    current, cost = key, _cost(key)
    flat = 0
    improved = True
    while improved:
        improved = False
        for h in moves:
            candidate = set_key([evaluate(h, w) for w in current], model)
            if len(candidate) != len(current):
                continue
            c = _cost(candidate)
            if c < cost:
                if c[0] == cost[0]:
                    if flat >= plateau:
                        continue
                    flat += 1
                current, cost = candidate, c
                improved = True
                break
    return current


def generates(key: SetKey, model: GroupModel, depth: int = GENERATION_DEPTH) -> bool:
    """Every standard generator is a product of at most depth entries (semi-decision)."""
    S = make_generating_set(model, key)
    ball = power_set_lengths(S, depth)
    return all(g in ball for g in model.standard_generators())


class SpectrumService:
    def __init__(
        self,
        model: GroupModel,
        depth: int,
        cap: int = DEFAULT_CAP,
        shards: int = DEFAULT_SHARDS,
        candidate_cap: int = MAX_CANDIDATES,
        generation_depth: int = GENERATION_DEPTH,
        plateau: int = PLATEAU_MOVES,
    ):
        if depth < 2:
            raise ValidationException("spectrum scans need depth >= 2")
        self.model = model
        self.depth = depth
        self.cap = cap
        self.shards = max(1, shards)
        self.candidate_cap = candidate_cap
        self.generation_depth = generation_depth
        self.plateau = plateau
        self.moves = elementary_automorphisms(model)

    def candidate_sets(self, max_cardinality: int, max_length: int) -> Tuple[List[SetKey], bool]:
        """Inverse-class representatives combined up to the cardinality, shortlex order."""
        if max_cardinality < 1 or max_length < 1:
            raise ValidationException("max cardinality and max length must be positive")
        standard = make_generating_set(self.model, self.model.standard_generators())
        elements = power_set_lengths(standard, max_length)
        reps = sorted({inverse_representative(w, self.model) for w in elements if w}, key=shortlex_key)
        out: List[SetKey] = []
        truncated = False
        for size in range(1, max_cardinality + 1):
            for combo in itertools.combinations(reps, size):
                if len(out) >= self.candidate_cap:
                    truncated = True
                    break
                out.append(tuple(combo))
            if truncated:
                logger.warning(f"[SPECTRUM] candidate cap {self.candidate_cap} reached; table is partial")
                break
        return out, truncated

    def _classes(self, keys: Sequence[SetKey]) -> List[SetClass]:
        classes: Dict[SetKey, List[SetKey]] = {}
        for key in keys:
            classes.setdefault(canonical_key(key, self.model, self.moves, self.plateau), []).append(key)
        return [SetClass(k, v) for k, v in sorted(classes.items(), key=lambda item: _cost(item[0]))]

    def _table(self, key: SetKey) -> GrowthTable:
        return enumerate_balls(make_generating_set(self.model, key), self.depth, self.cap)

    def _measure(self, candidate: SetClass, verify_dedup: bool) -> Tuple[GrowthTable, GrowthEstimate]:
        table = self._table(candidate.key)
        if verify_dedup:
            for member in candidate.members:
                if member == candidate.key:
                    continue
                other = self._table(member)
                if not table.truncated and not other.truncated and other.ball != table.ball:
                    raise InvariantViolation(
                        "automorphic generating sets have equal balls",
                        other.ball,
                        table.ball,
                        make_generating_set(self.model, member).encoding(),
                    )
        return table, growth_estimate(table)

    def _scan(
        self,
        keys: Sequence[SetKey],
        truncated: bool,
        max_cardinality: int,
        max_length: int,
        excluded: int,
        keep=None,
        verify_dedup: bool = True,
    ) -> SpectrumTable:
        classes = self._classes(keys)
        if self.shards > 1:
            with ThreadPoolExecutor(max_workers=self.shards) as pool:
                measured = list(pool.map(lambda c: self._measure(c, verify_dedup), classes))
        else:
            measured = [self._measure(c, verify_dedup) for c in classes]

        rows: List[SpectrumRow] = []
        by_ball: Dict[Tuple[int, ...], int] = {}
        for candidate, (table, estimate) in zip(classes, measured):
            truncated = truncated or table.truncated
            if keep is not None and not keep(candidate.key, estimate):
                excluded += 1
                continue
            column = tuple(table.ball)
            if column in by_ball:
                rows[by_ball[column]] = rows[by_ball[column]].model_copy(update={"merged": True})
                continue
            by_ball[column] = len(rows)
            rows.append(
                SpectrumRow(
                    encoding=make_generating_set(self.model, candidate.key).encoding(),
                    size=len(candidate.key),
                    ball=table.ball,
                    point_estimate=estimate.point_estimate,
                    certified_upper=estimate.certified_upper,
                    class_id=0,
                )
            )
        rows.sort(key=lambda r: (r.point_estimate, r.encoding))
        rows = [r.model_copy(update={"class_id": i + 1, "minimum": i == 0}) for i, r in enumerate(rows)]
        logger.info(
            f"[SPECTRUM] model={self.model.name} candidates={len(keys)} classes={len(classes)} rows={len(rows)} excluded={excluded}"
        )
        return SpectrumTable(
            model=self.model.name,
            max_cardinality=max_cardinality,
            max_length=max_length,
            depth=self.depth,
            rows=rows,
            excluded=excluded,
            truncated=truncated,
        )

    def xi_scan(self, max_cardinality: int, max_length: int, verify_dedup: bool = True) -> SpectrumTable:
        """Generating sets of the whole group."""
        keys, truncated = self.candidate_sets(max_cardinality, max_length)
        generating = [k for k in keys if generates(k, self.model, self.generation_depth)]
        excluded = len(keys) - len(generating)
        logger.info(f"[SPECTRUM] xi: {excluded} candidates excluded (no generation witness within depth {self.generation_depth})")
        return self._scan(generating, truncated, max_cardinality, max_length, excluded, verify_dedup=verify_dedup)

    def theta_scan(
        self,
        max_cardinality: int,
        max_length: int,
        require_hyperbolic: bool = False,
        constants: Optional[ActionConstants] = None,
        verify_dedup: bool = True,
    ) -> SpectrumTable:
        """Subgroups ⟨S⟩ with exponential growth; optionally only those with a hyperbolic element in S^M."""
        keys, truncated = self.candidate_sets(max_cardinality, max_length)
        constructions = ConstructionService(SpaceModel(self.model), constants or ActionConstants()) if require_hyperbolic else None

        def keep(key: SetKey, estimate: GrowthEstimate) -> bool:
            if estimate.marker in ("finite", "subexponential") or estimate.certified_upper <= 1.0 + FLOAT_TOLERANCE:
                return False
            if constructions is not None:
                try:
                    constructions.find_hyperbolic_in_power(make_generating_set(self.model, key))
                except ConstructionException:
                    return False
            return True

        return self._scan(keys, truncated, max_cardinality, max_length, 0, keep=keep, verify_dedup=verify_dedup)
