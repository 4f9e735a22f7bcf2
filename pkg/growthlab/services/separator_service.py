import logging
import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

from ..constants import DEFAULT_POWER_CAP, SMALL_CANCELLATION_RADIUS
from ..dto import SeparatorReport
from ..exceptions import ConstructionException, InvariantViolation
from ..models import IDENTITY, ActionConstants, GeneratingSet, Word, shortlex_key
from ..space_service import Germ, SpaceModel, SpacePoint
from ..word_service import conjugate, invert, multiply, power, power_set_lengths, product, require_non_empty, word_summary
from .construction_service import ConstructionService

logger = logging.getLogger(__name__)

# (시작 germ, 끝 germ) 인덱스: 0 = [y, wy], 1 = [y, zy], 2 = [y, w⁻¹y], 3 = [y, z⁻¹y]
GERM_PATTERN: Tuple[Tuple[int, int], ...] = ((0, 2), (0, 3), (1, 2), (1, 3))


class GermContext(NamedTuple):
    S: GeneratingSet
    S_power: GeneratingSet
    lengths: Dict[Word, int]  # S^{2DM} 원소의 S-길이
    y: SpacePoint
    L: int
    L_S: int
    Delta: int


class SeparatorSet(NamedTuple):
    words: List[Word]
    context: GermContext
    fixers: List[List[Word]]
    s_lengths: List[int]
    inverses: List[Word]
    out_germs: List[Germ]  # germ(y, u_i y)
    in_germs: List[Germ]  # germ(y, u_i⁻¹ y)
    report: Optional[SeparatorReport] = None


def make_separator_set(
    space: SpaceModel,
    words: Sequence[Word],
    context: GermContext,
    fixers: Sequence[Sequence[Word]],
    s_lengths: Sequence[int],
    report: Optional[SeparatorReport] = None,
) -> SeparatorSet:
    y, Delta = context.y, context.Delta
    inverses = [invert(u, space.model) for u in words]
    return SeparatorSet(
        words=list(words),
        context=context,
        fixers=[list(f) for f in fixers],
        s_lengths=list(s_lengths),
        inverses=inverses,
        out_germs=[space.germ_of(y, space.translate(u, y), Delta) for u in words],
        in_germs=[space.germ_of(y, space.translate(v, y), Delta) for v in inverses],
        report=report,
    )


def separator_pieces(w: Word, z: Word, model) -> List[Word]:
    """u1 = w z w^2 z ... w^19 z w^20, u2 = w^21 z ... w^40 z, u3 = z w^41 ... z w^60, u4 = z w^61 ... z w^80 z."""
    u1 = product([item for j in range(1, 20) for item in (power(w, j, model), z)] + [power(w, 20, model)], model)
    u2 = product([item for j in range(21, 41) for item in (power(w, j, model), z)], model)
    u3 = product([item for j in range(41, 61) for item in (z, power(w, j, model))], model)
    u4 = product([item for j in range(61, 81) for item in (z, power(w, j, model))] + [z], model)
    return [u1, u2, u3, u4]


def separator_s_lengths(w_length: int, z_length: int) -> List[int]:
    return [
        sum(range(1, 21)) * w_length + 19 * z_length,
        sum(range(21, 41)) * w_length + 20 * z_length,
        sum(range(41, 61)) * w_length + 20 * z_length,
        sum(range(61, 81)) * w_length + 21 * z_length,
    ]


class SeparatorService:
    """Germ calculus at y and the four separators."""

    def __init__(self, space: SpaceModel, constants: ActionConstants, power_cap: int = DEFAULT_POWER_CAP):
        self.space = space
        self.model = space.model
        self.constants = constants
        self.power_cap = power_cap
        self.constructions = ConstructionService(space, constants, power_cap)

    def germ_context(self, S: GeneratingSet) -> GermContext:
        require_non_empty(S, "germ_context")
        c = self.constants
        exponent = 2 * c.D * c.M
        lengths = power_set_lengths(S, exponent, self.power_cap)
        S_power = GeneratingSet(
            model=self.model, elements=tuple(sorted((w for w in lengths if w), key=shortlex_key)), symmetrized=True
        )
        L, y = self.space.joint_displacement(S_power.elements)
        L_S, _ = self.space.joint_displacement(S.elements)
        if L < L_S:
            raise InvariantViolation("L(S^{2DM}) >= L(S)", L, L_S)
        Delta = math.ceil(100 * c.delta + 4 * c.D * L)
        if Delta <= 0:
            raise ConstructionException("germ-context", "Delta = 0: S^{2DM} has a global fixed point")
        logger.info(f"[SEPARATOR] context |S^{exponent}|={len(S_power)} L={L} Delta={Delta}")
        return GermContext(S, S_power, lengths, y, L, L_S, Delta)

    # -- separators -----------------------------------------------------------

    def build_separators(self, S: GeneratingSet, radius: int = SMALL_CANCELLATION_RADIUS) -> SeparatorSet:
        space, model, c = self.space, self.model, self.constants
        ctx = self.germ_context(S)
        witness, g, _ = self.constructions.displacement_search(ctx.S_power)
        s = self.constructions.non_elementary_conjugator(S, g)
        w = power(g, c.k, model)
        z = conjugate(w, s, model)
        words = separator_pieces(w, z, model)

        g_length = ctx.lengths[g] if witness.power == 1 else witness.power * 2 * c.D * c.M
        w_length = c.k * g_length
        z_length = w_length + 2 * ctx.lengths[s]
        s_lengths = separator_s_lengths(w_length, z_length)
        for i, n in enumerate(s_lengths):
            if n > c.b:
                raise InvariantViolation("|u_i|_S <= b", n, c.b, f"u{i + 1}")

        y, Delta = ctx.y, ctx.Delta
        germs = [
            space.germ_of(y, space.translate(h, y), Delta)
            for h in (w, z, invert(w, model), invert(z, model))
        ]
        if any(germ.empty for germ in germs):
            raise ConstructionException("separators", "a base germ is empty: w moves y less than 10 Delta")

        checks: Dict[str, bool] = {}
        checks["germs_opposite"] = all(
            space.germ_opposite(germs[a], germs[b]) for a in range(4) for b in range(a + 1, 4)
        )
        if not checks["germs_opposite"]:
            raise ConstructionException("separators", "base germs are not pairwise opposite")

        points = [space.translate(u, y) for u in words]
        for i, (u, P) in enumerate(zip(words, points)):
            start, end = GERM_PATTERN[i]
            if not space.germ_equivalent(space.germ_of(y, P, Delta), germs[start]):
                raise ConstructionException("separators", f"start germ of u{i + 1} is not equivalent to base germ {start + 1}")
            if not space.germ_equivalent(space.germ_of(P, y, Delta), space.translate_germ(u, germs[end])):
                raise ConstructionException("separators", f"end germ of u{i + 1} is not equivalent to u{i + 1} times base germ {end + 1}")
        checks["germ_identities"] = True

        lams = []
        for i, u in enumerate(words):
            axis = space.axis(u)
            lams.append(axis.translation_length)
            if axis.translation_length < 100 * Delta:
                raise InvariantViolation("lambda(u_i) >= 100 Delta", axis.translation_length, 100 * Delta, f"u{i + 1}")
            gap = space.distance_to_axis(axis, y)
            if gap > Delta:
                raise InvariantViolation("d(y, axis(u_i)) <= Delta", gap, Delta, f"u{i + 1}")
        checks["translation_lengths"] = True
        checks["axis_proximity"] = True

        fixers = [self.constructions.axis_fixer(space.axis(u)) for u in words]
        pairs = self.small_cancellation(words, points, fixers, ctx, radius)
        checks["small_cancellation"] = True

        report = SeparatorReport(
            words=[word_summary(u, model) for u in words],
            s_lengths=s_lengths,
            b=c.b,
            Delta=Delta,
            L_power=ctx.L,
            y=word_summary(y.address, model) + ("" if y.vertex is None else f"·v{model.layout().symbols[y.vertex]}"),
            translation_lengths=lams,
            checks=checks,
            small_cancellation_pairs=pairs,
        )
        logger.info(f"[SEPARATOR] built |u_i|_S={s_lengths} b={c.b} Delta={Delta} lambda={lams}")
        return make_separator_set(space, words, ctx, fixers, s_lengths, report)

    def small_cancellation(
        self,
        words: Sequence[Word],
        points: Sequence[SpacePoint],
        fixers: Sequence[Sequence[Word]],
        ctx: GermContext,
        radius: int,
    ) -> int:
        """10·|[y, u_i y] ∩ N(w[y, u_j y])| <= min lengths, for every w of S-length <= radius."""
        space = self.space
        y = ctx.y
        slack = 2 * math.ceil(20 * self.constants.delta)
        lengths = [space.dist(y, P) for P in points]
        ball = sorted(power_set_lengths(ctx.S, radius, self.power_cap), key=shortlex_key)
        checked = 0
        for h in ball:
            hy = space.translate(h, y)
            for j, P_j in enumerate(points):
                hP = space.translate(h, P_j)
                for i, P_i in enumerate(points):
                    if i == j and h in fixers[i]:
                        continue
                    overlap = space.segment_overlap(y, P_i, hy, hP) + slack
                    bound = min(lengths[i], lengths[j])
                    checked += 1
                    if 10 * overlap > bound:
                        raise InvariantViolation(
                            "10 overlap <= min(d(y, u_i y), d(y, u_j y))",
                            10 * overlap,
                            bound,
                            f"i={i + 1} j={j + 1} w={word_summary(h, self.model)}",
                        )
        return checked

    # -- admissibility --------------------------------------------------------

    def _opens_toward(self, seps: SeparatorSet, w: Word, germ: Germ) -> bool:
        """germ([w y, y]) is opposite w·germ (pulled back to y), or w y is within 10Δ of y."""
        space = self.space
        y, Delta = seps.context.y, seps.context.Delta
        back = space.translate(invert(w, self.model), y)
        if space.dist(y, back) < 10 * Delta:
            return True
        return space.germ_opposite(space.germ_of(y, back, Delta), germ)

    def admissible_indices(self, seps: SeparatorSet, w: Word) -> List[int]:
        """0-based indices of the separators admissible after w."""
        return [i for i, germ in enumerate(seps.out_germs) if self._opens_toward(seps, w, germ)]

    def choose_admissible(self, seps: SeparatorSet, w: Word, w_next: Word = IDENTITY) -> int:
        """1-based index of the least u admissible for w with u⁻¹ admissible for w_next⁻¹; bounds are checked."""
        inv_next = invert(w_next, self.model)
        for i, u in enumerate(seps.words):
            if not self._opens_toward(seps, w, seps.out_germs[i]):
                continue
            if not self._opens_toward(seps, inv_next, seps.in_germs[i]):
                continue
            self.check_concatenation(seps, w, u, w_next)
            return i + 1
        raise ConstructionException(
            "admissible", f"no admissible separator for w={word_summary(w, self.model)}: broken separator set"
        )

    def check_concatenation(self, seps: SeparatorSet, w: Word, u: Word, w_next: Word) -> None:
        space, model = self.space, self.model
        y, Delta = seps.context.y, seps.context.Delta
        delta = self.constants.delta
        wy = space.translate(w, y)
        wu = multiply(w, u, model)
        wuy = space.translate(wu, y)
        d_w = space.dist(y, wy)
        d_u = space.dist(wy, wuy)
        if d_w < 10 * Delta:
            return
        total = space.dist(y, wuy)
        if total < d_w + d_u - 4 * Delta:
            raise InvariantViolation("d(y, wuy) >= d(y, wy) + d(wy, wuy) - 4 Delta", total, d_w + d_u - 4 * Delta)
        gap = space.distance_to_segment(wy, y, wuy)
        if gap > 2 * Delta + 10 * delta:
            raise InvariantViolation(
                "Hausdorff([y, wuy], [y, wy] + [wy, wuy]) <= 2 Delta + 10 delta", gap, 2 * Delta + 10 * delta
            )
        wuv_y = space.translate(multiply(wu, w_next, model), y)
        d_v = space.dist(wuy, wuv_y)
        # 세 조각 하한은 양쪽 germ 조건이 모두 걸릴 때만 성립
        if d_v >= 10 * Delta:
            total = space.dist(y, wuv_y)
            if total < d_w + d_u + d_v - 8 * Delta:
                raise InvariantViolation(
                    "d(y, w u w' y) >= d(y,wy) + d(wy,wuy) + d(wuy,wuw'y) - 8 Delta", total, d_w + d_u + d_v - 8 * Delta
                )
