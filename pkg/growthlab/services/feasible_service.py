"""Forbidden and adequate elements, the feasible map Φ and its injectivity."""
import hashlib
import itertools
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..constants import DEFAULT_POWER_CAP, DEFAULT_SEED, FLOAT_TOLERANCE
from ..dto import FeasibleReport, GrowthEstimate
from ..exceptions import InvariantViolation, ValidationException
from ..models import IDENTITY, ActionConstants, Word, shortlex_key
from ..space_service import SpaceModel, SpacePoint
from ..word_service import multiply, power_set_lengths, word_summary
from .separator_service import SeparatorService, SeparatorSet

logger = logging.getLogger(__name__)

HAUSDORFF_SAMPLES = 64


def word_digest(word: Word) -> bytes:
    return hashlib.sha1(np.asarray(word, dtype=np.int32).tobytes()).digest()


class FeasibleService:
    def __init__(self, separators: SeparatorService, seps: SeparatorSet, power_cap: int = DEFAULT_POWER_CAP):
        self.separators = separators
        self.seps = seps
        self.space: SpaceModel = separators.space
        self.model = separators.model
        self.constants: ActionConstants = separators.constants
        self.power_cap = power_cap
        self._balls: Dict[int, List[Word]] = {}

    def ball(self, m: int) -> List[Word]:
        """B_m over the separators' generating set, shortlex order."""
        if m < 0:
            raise ValidationException("m must be non-negative")
        if m not in self._balls:
            lengths = power_set_lengths(self.seps.context.S, m, self.power_cap)
            self._balls[m] = sorted(lengths, key=shortlex_key)
        return self._balls[m]

    # -- forbidden --------------------------------------------------------------

    def forbidden_test(self, w_prime: Word, ball: Sequence[Word], points: Optional[Sequence[SpacePoint]] = None) -> Tuple[bool, Optional[Word]]:
        """True with witness w if 5·d(w y, w'u y) <= d(y, u y) for some w in the ball and admissible u."""
        space, seps = self.space, self.seps
        y = seps.context.y
        points = points if points is not None else [space.translate(w, y) for w in ball]
        for i in self.separators.admissible_indices(seps, w_prime):
            u = seps.words[i]
            tip = space.translate(multiply(w_prime, u, self.model), y)
            reach = space.dist(y, space.translate(u, y))
            for w, p in zip(ball, points):
                if 5 * space.dist(p, tip) <= reach:
                    return True, w
        return False, None

    def classify(self, m: int, assert_bounds: bool = True) -> Tuple[List[Word], List[Word]]:
        ball = self.ball(m)
        y = self.seps.context.y
        points = [self.space.translate(w, y) for w in ball]
        forbidden: List[Word] = []
        allowed: List[Word] = []
        for w_prime in ball:
            hit, _ = self.forbidden_test(w_prime, ball, points)
            (forbidden if hit else allowed).append(w_prime)
        D = self.constants.D
        if assert_bounds and len(forbidden) > D * len(allowed):
            raise InvariantViolation("#forbidden <= D #non-forbidden", len(forbidden), D * len(allowed), f"m={m}")
        logger.info(f"[FEASIBLE] m={m} ball={len(ball)} forbidden={len(forbidden)} non_forbidden={len(allowed)}")
        return forbidden, allowed

    # -- adequate ---------------------------------------------------------------

    def adequate_selection(self, m: int, non_forbidden: Optional[Sequence[Word]] = None) -> List[Word]:
        """Greedy shortlex choice of non-forbidden elements in pairwise distinct right F(u_i)-cosets."""
        if non_forbidden is None:
            _, non_forbidden = self.classify(m)
        fixers = [[f for f in fs if f] for fs in self.seps.fixers]
        chosen: List[Word] = []
        taken = set()
        for w in sorted(non_forbidden, key=shortlex_key):
            if w in taken:
                continue
            chosen.append(w)
            taken.add(w)
            for fs in fixers:
                for f in fs:
                    taken.add(multiply(f, w, self.model))
        D = self.constants.D
        ball_size = len(self.ball(m))
        if ball_size > D ** 4 * (D + 1) * len(chosen):
            raise InvariantViolation("|B_m| / (D^4 (D+1)) <= #adequate", ball_size, D ** 4 * (D + 1) * len(chosen), f"m={m}")
        return chosen

    # -- Φ ----------------------------------------------------------------------

    def phi_map(self, words: Sequence[Word]) -> Tuple[Word, List[int]]:
        """w_1 u_1 w_2 u_2 ... w_q u_q with u_i admissible for (w_i, w_{i+1}), w_{q+1} = e."""
        if not words:
            raise ValidationException("phi_map needs a non-empty tuple")
        result = IDENTITY
        chosen: List[int] = []
        for i, w in enumerate(words):
            nxt = words[i + 1] if i + 1 < len(words) else IDENTITY
            index = self.separators.choose_admissible(self.seps, w, nxt)
            chosen.append(index)
            result = multiply(multiply(result, w, self.model), self.seps.words[index - 1], self.model)
        return result, chosen

    def broken_path_gap(self, words: Sequence[Word], chosen: Sequence[int]) -> int:
        """Largest distance from a breakpoint of the broken path to [y, Φ y]."""
        space, y = self.space, self.seps.context.y
        breakpoints = [y]
        current = IDENTITY
        for w, index in zip(words, chosen):
            current = multiply(current, w, self.model)
            breakpoints.append(space.translate(current, y))
            current = multiply(current, self.seps.words[index - 1], self.model)
            breakpoints.append(space.translate(current, y))
        end = breakpoints[-1]
        return max(space.distance_to_segment(p, y, end) for p in breakpoints)

    def phi_injectivity_check(
        self,
        m: int,
        q: int,
        samples: int = HAUSDORFF_SAMPLES,
        seed: int = DEFAULT_SEED,
    ) -> FeasibleReport:
        if q < 1:
            raise ValidationException("q must be positive")
        forbidden, allowed = self.classify(m)
        adequate = self.adequate_selection(m, allowed)
        seen: Dict[bytes, Tuple[Word, ...]] = {}
        tuples = list(itertools.product(adequate, repeat=q))
        records: List[Tuple[Tuple[Word, ...], List[int]]] = []
        for tup in tuples:
            image, chosen = self.phi_map(tup)
            key = word_digest(image)
            if key in seen:
                first = ", ".join(word_summary(w, self.model) for w in seen[key])
                second = ", ".join(word_summary(w, self.model) for w in tup)
                raise InvariantViolation("Phi injective on adequate q-tuples", f"({first})", f"({second})", f"m={m} q={q}")
            seen[key] = tup
            records.append((tup, chosen))

        bound = 2 * self.seps.context.Delta + 100 * self.constants.delta
        rng = np.random.default_rng(seed)
        picks = range(len(records)) if len(records) <= samples else rng.choice(len(records), size=samples, replace=False)
        for index in sorted(int(i) for i in picks):
            tup, chosen = records[index]
            gap = self.broken_path_gap(tup, chosen)
            if gap > bound:
                raise InvariantViolation(
                    "Hausdorff(broken path, [y, Phi y]) <= 2 Delta + 100 delta",
                    gap,
                    bound,
                    ", ".join(word_summary(w, self.model) for w in tup),
                )

        D = self.constants.D
        ball_size = len(self.ball(m))
        report = FeasibleReport(
            m=m,
            q=q,
            ball_size=ball_size,
            forbidden=len(forbidden),
            non_forbidden=len(allowed),
            adequate=len(adequate),
            adequate_bound=ball_size / (D ** 4 * (D + 1)),
            tuples_checked=len(tuples),
            images_distinct=True,
        )
        logger.info(f"[FEASIBLE] phi injective m={m} q={q} tuples={len(tuples)} adequate={len(adequate)}")
        return report

    def naive_concatenation_collisions(self, m: int, q: int) -> int:
        """Number of q-tuples of B_m whose plain product repeats an earlier tuple's."""
        ball = self.ball(m)
        seen = set()
        collisions = 0
        for tup in itertools.product(ball, repeat=q):
            image = IDENTITY
            for w in tup:
                image = multiply(image, w, self.model)
            if image in seen:
                collisions += 1
            else:
                seen.add(image)
        return collisions

    def feasible_growth_bound(self, m: int, q: int, estimate: Optional[GrowthEstimate] = None) -> FeasibleReport:
        """Lower bounds on e(G,S) implied by an injective Φ: #adequate^{1/(m+b')} and the constant-b form."""
        report = self.phi_injectivity_check(m, q)
        b_actual = max(self.seps.s_lengths)
        implied = math.exp(math.log(report.adequate) / (m + b_actual)) if report.adequate else 1.0
        base = report.adequate_bound
        implied_b = max(1.0, math.exp(math.log(base) / (m + self.constants.b))) if base > 0 else 1.0
        if estimate is not None:
            for name, value in (("adequate^(1/(m+b'))", implied), ("(|B_m|/(D^4(D+1)))^(1/(m+b))", implied_b)):
                if value > estimate.certified_upper + FLOAT_TOLERANCE:
                    raise InvariantViolation(f"{name} <= certified_upper", value, estimate.certified_upper)
        logger.info(f"[FEASIBLE] implied lower={implied:.12g} constant_b={implied_b:.12g} b'={b_actual}")
        return report.model_copy(update={"implied_lower": implied, "implied_lower_constant_b": implied_b})
