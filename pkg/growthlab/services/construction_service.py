import logging
import math
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Tuple

from ..constants import AUDIT_PING_PONG_DEPTH, DEFAULT_POWER_CAP, FLOAT_TOLERANCE, PING_PONG_DEPTH, PRIMITIVITY_RADIUS
from ..dto import (
    AxisRecord,
    DisplacementWitness,
    FreePairCertificate,
    GrowthEstimate,
    LowerBoundCertificate,
    PrimitiveElement,
)
from ..exceptions import ConstructionException, InvariantViolation
from ..models import IDENTITY, ActionConstants, GeneratingSet, Word, shortlex_key
from ..space_service import PARALLEL, Axis, SpaceModel, SpacePoint
from ..word_service import (
    conjugate,
    format_word,
    invert,
    multiply,
    power,
    power_set_lengths,
    require_non_empty,
    symmetrize,
    word_summary,
)

logger = logging.getLogger(__name__)


class Candidate(NamedTuple):
    """S^p의 원소와 S-길이 (추적값)"""
    word: Word
    s_length: int


class FreePair(NamedTuple):
    g: Word
    s: Word
    k: int
    w1: Word
    w2: Word
    g_length: int  # |g|_S
    s_length: int  # |s|_S
    certificate: FreePairCertificate


class PrimitiveResult(NamedTuple):
    u: Word
    s_length: int
    axis: Axis
    fixer: List[Word]
    report: PrimitiveElement


def reduced_words(alphabet_size: int, depth: int):
    """Non-empty freely reduced words over x_1..x_n and inverses, as index tuples, depth-first."""
    letters = [i + 1 for i in range(alphabet_size)] + [-(i + 1) for i in range(alphabet_size)]
    stack: List[Tuple[int, ...]] = [(x,) for x in reversed(letters)]
    while stack:
        word = stack.pop()
        yield word
        if len(word) < depth:
            for x in reversed(letters):
                if x != -word[-1]:
                    stack.append(word + (x,))


class ConstructionService:
    """Displacement search, free pairs and the primitive element on one tree action."""

    def __init__(self, space: SpaceModel, constants: ActionConstants, power_cap: int = DEFAULT_POWER_CAP):
        self.space = space
        self.model = space.model
        self.constants = constants
        self.power_cap = power_cap

    # -- helpers ------------------------------------------------------------

    def _fmt(self, word: Word) -> str:
        return word_summary(word, self.model)

    def _point(self, x: SpacePoint) -> str:
        text = self._fmt(x.address)
        return text if x.vertex is None else f"{text}·v{self.model.layout().symbols[x.vertex]}"

    def axis_record(self, axis: Axis) -> AxisRecord:
        return AxisRecord(
            carrier=self._fmt(axis.carrier),
            translation_length=axis.translation_length,
            basepoint=self._point(axis.basepoint),
        )

    def check_lambda_lower_bound(self, g: Word, lam: Optional[int] = None) -> None:
        """λ(g) >= 50δ/D for hyperbolic g."""
        lam = self.space.translation_length(g) if lam is None else lam
        if lam > 0 and Fraction(lam) < self.constants.T:
            raise InvariantViolation("lambda(g) >= 50 delta / D", lam, self.constants.T, self._fmt(g))

    # -- hyperbolic element searches -----------------------------------------

    def find_hyperbolic_in_power(self, S: GeneratingSet, max_power: Optional[int] = None) -> Candidate:
        """First hyperbolic element (shortlex) in the least power S^p, p <= M, that has one.

        <S> must act non-elementarily: some s in S^{±1} moves the axis of the element found.
        """
        require_non_empty(S, "find_hyperbolic_in_power")
        max_power = self.constants.M if max_power is None else max_power
        for p in range(1, max_power + 1):
            lengths = power_set_lengths(S, p, self.power_cap)
            for w in sorted((w for w, n in lengths.items() if n == p), key=shortlex_key):
                lam = self.space.translation_length(w)
                if lam > 0:
                    self.check_lambda_lower_bound(w, lam)
                    try:
                        self.non_elementary_conjugator(S, w)
                    except ConstructionException as e:
                        raise ConstructionException(
                            "find-hyperbolic", f"<S> is elementary: {self._fmt(w)} is hyperbolic but {e.message}"
                        ) from e
                    logger.info(f"[CONSTRUCT] hyperbolic element g={self._fmt(w)} power={p} lambda={lam}")
                    return Candidate(w, p)
        raise ConstructionException(
            "find-hyperbolic",
            f"no hyperbolic element in S^{max_power} for {self.model.name}: <S> is elementary or M is too small",
        )

    def large_displacement_element(self, S: GeneratingSet) -> DisplacementWitness:
        return self.displacement_search(S)[0]

    def displacement_search(self, S: GeneratingSet) -> Tuple[DisplacementWitness, Word, SpacePoint]:
        """Hyperbolic g in S (else S^2) with d(x, gx) >= L(S) - 8δ and L(g) >= d(x, gx) - 16δ.

        Maximal displacement first, then shortlex. Returns the witness record, g and x.
        """
        require_non_empty(S, "large_displacement_element")
        space = self.space
        delta = self.constants.delta
        L_S, x = space.joint_displacement(S.elements)
        if L_S < 1 or L_S < 30 * delta:
            raise ConstructionException("large-displacement", f"L(S)={L_S} < max(1, 30 delta): S has a common fixed point")
        for p in (1, 2):
            lengths = power_set_lengths(S, p, self.power_cap)
            best: Optional[Tuple[int, Tuple, Word, int]] = None
            for w, n in lengths.items():
                if n != p:
                    continue
                disp = space.displacement(w, x)
                if disp < L_S - 8 * delta:
                    continue
                lam = space.translation_length(w, x)
                if lam == 0 or lam < disp - 16 * delta:
                    continue
                key = (-disp, shortlex_key(w), w, lam)
                if best is None or key[:2] < best[:2]:
                    best = key
            if best is None:
                continue
            disp, g, lam = -best[0], best[2], best[3]
            self.check_lambda_lower_bound(g, lam)
            axis_gap = space.distance_to_axis(space.axis(g), x)
            if axis_gap > 20 * delta:
                raise InvariantViolation("d(x, axis(g)) <= 20 delta", axis_gap, 20 * delta, self._fmt(g))
            logger.info(f"[CONSTRUCT] large displacement g={self._fmt(g)} L(S)={L_S} disp={disp} lambda={lam}")
            witness = DisplacementWitness(
                g=self._fmt(g), x=self._point(x), L_S=L_S, displacement=disp, L_g=lam, power=p
            )
            return witness, g, x
        raise ConstructionException(
            "large-displacement", "no hyperbolic element of large displacement in S^2; try find_hyperbolic_in_power"
        )

    # -- non-elementarity and free pairs ------------------------------------

    def non_elementary_conjugator(self, S: GeneratingSet, g: Word) -> Word:
        """Least s in S^{±1} with s·axis(g) not parallel to axis(g)."""
        for s in symmetrize(S).elements:
            if not self.space.commute(conjugate(g, s, self.model), g):
                return s
        raise ConstructionException(
            "non-elementarity", f"every s in S preserves the axis of {self._fmt(g)}: <S> is virtually cyclic"
        )

    def build_free_pair(self, S: GeneratingSet, depth: int = PING_PONG_DEPTH) -> FreePair:
        witness, g, x = self.displacement_search(S)
        return self.free_pair_from(S, g, witness.power, witness.L_g, depth)

    def free_pair_from(self, S: GeneratingSet, g: Word, g_length: int, L_g: int, depth: int = PING_PONG_DEPTH) -> FreePair:
        space, model, c = self.space, self.model, self.constants
        s = self.non_elementary_conjugator(S, g)
        overlap = space.axes_overlap(g, space.translate_axis(s, space.axis(g)))
        bound = 2 * c.D * L_g + 100 * c.delta
        if overlap is PARALLEL or overlap > bound:
            raise InvariantViolation("overlap(axis(g), s axis(g)) <= 2 D L(g) + 100 delta", overlap, bound, self._fmt(s))
        k = c.k
        w1 = power(g, k, model)
        w2 = conjugate(w1, s, model)
        lam_bound = 10 * (2 * c.D * L_g + 100 * c.delta)
        checked, min_lam = self.ping_pong([w1, w2], depth, lam_bound)
        cert = FreePairCertificate(
            generators=[self._fmt(w1), self._fmt(w2)],
            k=k,
            s=self._fmt(s),
            depth=depth,
            words_checked=checked,
            min_translation_length=min_lam,
            lambda_bound=math.ceil(lam_bound),
            passed=True,
        )
        logger.info(f"[CONSTRUCT] free pair k={k} s={cert.s} depth={depth} words={checked} min_lambda={min_lam}")
        return FreePair(g, s, k, w1, w2, g_length, 1, cert)

    def ping_pong(self, basis: List[Word], depth: int, lam_bound=0) -> Tuple[int, int]:
        """Every non-empty reduced word of length <= depth in the basis is non-trivial with λ >= lam_bound."""
        model, space = self.model, self.space
        inverses = [invert(b, model) for b in basis]

        def image(x: int) -> Word:
            return basis[x - 1] if x > 0 else inverses[-x - 1]

        checked = 0
        min_lam: Optional[int] = None
        prefix: Dict[Tuple[int, ...], Word] = {(): IDENTITY}
        for word in reduced_words(len(basis), depth):
            value = multiply(prefix[word[:-1]], image(word[-1]), model)
            if len(word) < depth:
                prefix[word] = value
            checked += 1
            if not value:
                raise ConstructionException("ping-pong", f"relation of length {len(word)} found: {word}")
            lam = space.translation_length(value)
            if lam < lam_bound:
                raise InvariantViolation("lambda(h) >= 10(2 D L(g) + 100 delta)", lam, lam_bound, str(word))
            min_lam = lam if min_lam is None else min(min_lam, lam)
        return checked, min_lam or 0

    # -- primitive element ----------------------------------------------------

    def build_primitive_u(self, pair: FreePair, x: SpacePoint, L_g: int, power_used: int) -> PrimitiveResult:
        """u = g^k (s g^2k s⁻¹) g^3k (s g^k s⁻¹) g^k and its checks."""
        if not pair.certificate.passed:
            raise ConstructionException("primitive-u", "free pair certificate did not pass")
        space, model, c = self.space, self.model, self.constants
        g, s, k = pair.g, pair.s, pair.k
        u = multiply(
            multiply(multiply(pair.w1, conjugate(power(g, 2 * k, model), s, model), model), power(g, 3 * k, model), model),
            multiply(pair.w2, pair.w1, model),
            model,
        )
        s_length = 8 * k * pair.g_length + 4 * pair.s_length
        length_bound = c.m * power_used
        lam = space.translation_length(u)
        lam_bound = 10 * (2 * c.D * L_g + 100 * c.delta)
        axis = space.axis(u)
        gap = space.distance_to_axis(axis, x)
        fixer = self.axis_fixer(axis)
        primitive = self.primitivity_desk_check(u)
        checks = {
            "word_length": s_length <= length_bound,
            "lambda_bound": lam >= lam_bound,
            "axis_proximity": gap <= 50 * c.delta,
            "primitive": primitive is None,
            "fixer_bounded": len(fixer) <= c.D,
        }
        if not checks["word_length"]:
            raise InvariantViolation("|u|_S <= m * power", s_length, length_bound)
        if not checks["lambda_bound"]:
            raise InvariantViolation("lambda(u) >= 10(2 D L(g) + 100 delta)", lam, lam_bound)
        if not checks["axis_proximity"]:
            raise InvariantViolation("d(x, axis(u)) <= 50 delta", gap, 50 * c.delta)
        if primitive is not None:
            raise InvariantViolation("u is primitive", self._fmt(primitive), "axis(u)", "element preserving axis(u)")
        if not checks["fixer_bounded"]:
            raise InvariantViolation("|F(u)| <= D", len(fixer), c.D)
        report = PrimitiveElement(
            u=self._fmt(u),
            u_length=len(u),
            s_length=s_length,
            s_length_bound=length_bound,
            axis=self.axis_record(axis),
            checks=checks,
            fixer_size=len(fixer),
        )
        logger.info(f"[CONSTRUCT] primitive u lambda={lam} |u|_S<={s_length} bound={length_bound}")
        return PrimitiveResult(u, s_length, axis, fixer, report)

    def primitivity_desk_check(self, u: Word, radius: int = PRIMITIVITY_RADIUS) -> Optional[Word]:
        """First non-trivial h of word length <= radius with h·axis(u) = axis(u), or None."""
        for h in self.space.element_ball(radius):
            if h and self.space.commute(conjugate(u, h, self.model), u):
                return h
        return None

    def axis_fixer(self, axis: Axis, radius: int = PRIMITIVITY_RADIUS) -> List[Word]:
        """Elements of the ball fixing two axis points at distance λ (the pointwise stabilizer)."""
        space = self.space
        p = axis.basepoint
        q = space.translate(axis.carrier, p)
        return [h for h in space.element_ball(radius) if space.translate(h, p) == p and space.translate(h, q) == q]

    # -- full construction -----------------------------------------------------

    def primitive_pipeline(self, S: GeneratingSet, depth: int = PING_PONG_DEPTH, s_power: int = 1) -> Tuple[FreePair, PrimitiveResult]:
        """Free pair and primitive u for S; s_power is p when S = T^p for the reporting set T."""
        witness, g, x = self.displacement_search(S)
        pair = self.free_pair_from(S, g, witness.power, witness.L_g, depth)
        prim = self.build_primitive_u(pair, x, witness.L_g, witness.power * s_power)
        return pair, prim

    def lower_bound_audit(
        self,
        S: GeneratingSet,
        estimate: Optional[GrowthEstimate] = None,
        depth: int = AUDIT_PING_PONG_DEPTH,
    ) -> LowerBoundCertificate:
        """W, U = u^{20D}, B = {w U w⁻¹} and the implied bound on e(G, S)."""
        require_non_empty(S, "lower_bound_audit")
        model, c = self.model, self.constants
        MD = c.M * c.D
        lengths = power_set_lengths(S, MD, self.power_cap)
        S_power = GeneratingSet(
            model=model, elements=tuple(sorted((w for w in lengths if w), key=shortlex_key)), symmetrized=True
        )
        witness, g, x = self.displacement_search(S_power)
        pair = self.free_pair_from(S_power, g, witness.power, witness.L_g, min(depth, PING_PONG_DEPTH))
        # S^{MD} 원소의 S-길이로 추적
        g_length = lengths[g] if witness.power == 1 else witness.power * MD
        pair = pair._replace(g_length=g_length, s_length=lengths[pair.s])
        prim = self.build_primitive_u(pair, x, witness.L_g, witness.power * MD)

        W: List[Word] = []
        for w in S.elements:
            if all(multiply(invert(v, model), w, model) not in prim.fixer for v in W):
                W.append(w)
        if len(W) * c.D < len(S.elements):
            raise InvariantViolation("|W| >= |S| / D", len(W), Fraction(len(S.elements), c.D))
        U = power(prim.u, 20 * c.D, model)
        basis = [conjugate(U, w, model) for w in W]
        self.ping_pong(basis, depth)

        basis_lengths = [2 * lengths[w] + 20 * c.D * prim.s_length for w in W]
        actual_power = max(basis_lengths)
        power_bound = c.lower_bound_power
        if actual_power > power_bound:
            raise InvariantViolation("basis in S^(20 M D^2 m + 2)", actual_power, power_bound)
        implied = len(W) ** (1.0 / power_bound)
        certified = len(W) ** (1.0 / actual_power)
        A = float(c.A)
        A_bound = A * len(S.elements) ** A
        if A_bound > implied + FLOAT_TOLERANCE:
            raise InvariantViolation("A|S|^A <= |W|^(1/p)", A_bound, implied)
        if estimate is not None:
            if certified > estimate.point_estimate + FLOAT_TOLERANCE:
                raise InvariantViolation("certified_lower <= point_estimate", certified, estimate.point_estimate)
            if estimate.point_estimate > estimate.certified_upper + FLOAT_TOLERANCE:
                raise InvariantViolation("point_estimate <= certified_upper", estimate.point_estimate, estimate.certified_upper)
        logger.info(f"[CONSTRUCT] lower bound |W|={len(W)} p={actual_power} implied={implied:.12g} certified={certified:.12g}")
        return LowerBoundCertificate(
            W=[format_word(w, model) for w in W],
            u=self._fmt(prim.u),
            U=self._fmt(U),
            basis_lengths=basis_lengths,
            ping_pong_depth=depth,
            power_bound=power_bound,
            actual_power=actual_power,
            implied_bound=implied,
            certified_lower=certified,
            A_bound=A_bound,
            passed=True,
        )
