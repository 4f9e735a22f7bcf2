"""Bass–Serre / Cayley trees realized lazily from normal forms.

Every point is a group element ``address`` together with a vertex type:
``vertex=None`` is the vertex of the element itself, ``vertex=f`` is the coset
vertex ``address·A_f`` of the finite (or Baumslag–Solitar) factor f.  The
geodesic from the base vertex to a point is spelled by edge labels derived
from the syllables of the address, so distances are
``|labels(x)| + |labels(y)| - 2·(common prefix)``.

When a free product has exactly two vertex factors and no infinite cyclic
factor the free vertices are dropped and distances are halved, which gives
the classical edge tree of A * B.
"""
import logging
import math
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .exceptions import (
    CapExceededException,
    GermComparisonException,
    InvariantViolation,
    ValidationException,
)
from .models import FactorKind, GroupModel, Word, shortlex_key
from .word_service import (
    invert,
    make_generating_set,
    multiply,
    power,
    power_set_lengths,
    strip_trailing_factor,
    syllables,
)

logger = logging.getLogger(__name__)

# 라벨 캐시 상한 (긴 분리자 단어 몇 개만 담으면 충분)
LABEL_CACHE_SIZE = 256


class SpacePoint(NamedTuple):
    address: Word
    vertex: Optional[int] = None


class Axis(NamedTuple):
    carrier: Word
    basepoint: SpacePoint
    translation_length: int


class Classification(NamedTuple):
    kind: str
    translation_length: int
    axis: Optional[Axis] = None

    @property
    def hyperbolic(self) -> bool:
        return self.kind == "hyperbolic"


class Germ(NamedTuple):
    origin: SpacePoint
    endpoint: Optional[SpacePoint]
    scale: int

    @property
    def empty(self) -> bool:
        return self.endpoint is None


class Parallel:
    """axes_overlap의 무한 겹침 표지"""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Parallel"


PARALLEL = Parallel()


def common_prefix_length(a: Sequence, b: Sequence) -> int:
    n = min(len(a), len(b))
    if a[:n] == b[:n]:
        return n
    lo, hi = 0, n
    # a[:lo] == b[:lo], a[:hi] != b[:hi]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if a[lo:mid] == b[lo:mid]:
            lo = mid
        else:
            hi = mid
    return lo


class SpaceModel:
    """The tree a GroupModel acts on, with exact metric queries (δ = 0)."""

    def __init__(self, model: GroupModel, delta: Fraction = Fraction(0)):
        self.model = model
        self.delta = Fraction(delta)
        layout = model.layout()
        self.layout = layout
        self.half_scale = layout.half_scale
        self.scale = 2 if self.half_scale else 1
        self.base_point = SpacePoint((), layout.vertex_factors[0] if self.half_scale else None)
        self._labels: Dict[SpacePoint, tuple] = {}

    def __repr__(self) -> str:
        mode = "edge-tree" if self.half_scale else ("cayley-tree" if self.layout.all_loops else "star-tree")
        return f"SpaceModel({self.model.name}, {mode}, delta={self.delta})"

    # -- labels -------------------------------------------------------------

    def labels(self, x: SpacePoint) -> tuple:
        if self.layout.all_loops:
            return x.address
        cached = self._labels.get(x)
        if cached is not None:
            return cached
        out: List[object] = []
        factors = self.layout.factors
        address = x.address
        for pos, start, end in syllables(address, self.model):
            if factors[pos].is_loop:
                out.extend(address[start:end])
            else:
                out.append(("in", pos))
                out.append(("out", pos, address[start:end]))
        if x.vertex is not None:
            out.append(("in", x.vertex))
        result = tuple(out)
        if len(self._labels) >= LABEL_CACHE_SIZE:
            self._labels.clear()
        self._labels[x] = result
        return result

    def _from_labels(self, labels: Sequence) -> SpacePoint:
        if self.layout.all_loops:
            return SpacePoint(tuple(labels), None)
        letters: List[int] = []
        for label in labels:
            if isinstance(label, int):
                letters.append(label)
            elif label[0] == "out":
                letters.extend(label[2])
        vertex = None
        if labels and not isinstance(labels[-1], int) and labels[-1][0] == "in":
            vertex = labels[-1][1]
        return SpacePoint(tuple(letters), vertex)

    # -- metric -------------------------------------------------------------

    def dist(self, x: SpacePoint, y: SpacePoint) -> int:
        if x == y:
            return 0
        lx, ly = self.labels(x), self.labels(y)
        raw = len(lx) + len(ly) - 2 * common_prefix_length(lx, ly)
        return raw // self.scale

    def point(self, g: Word) -> SpacePoint:
        """g · base_point"""
        return self.translate(g, self.base_point)

    def translate(self, g: Word, x: SpacePoint) -> SpacePoint:
        address = multiply(g, x.address, self.model)
        if x.vertex is not None:
            address = strip_trailing_factor(address, x.vertex, self.model)
        return SpacePoint(address, x.vertex)

    def point_along(self, x: SpacePoint, y: SpacePoint, t: int) -> SpacePoint:
        """The point at distance t from x on [x, y]."""
        if t <= 0:
            return x
        lx, ly = self.labels(x), self.labels(y)
        c = common_prefix_length(lx, ly)
        up = len(lx) - c
        steps = t * self.scale
        if steps > up + len(ly) - c:
            raise ValidationException(f"point_along: t={t} exceeds d(x, y)")
        if steps <= up:
            return self._from_labels(lx[: len(lx) - steps])
        return self._from_labels(ly[: c + (steps - up)])

    def first_step(self, x: SpacePoint, y: SpacePoint) -> SpacePoint:
        return self.point_along(x, y, 1)

    def distance_to_segment(self, p: SpacePoint, a: SpacePoint, b: SpacePoint) -> int:
        # 트리에서는 (a | b)_p 가 p에서 [a, b]까지의 거리
        return (self.dist(p, a) + self.dist(p, b) - self.dist(a, b)) // 2

    def segment_overlap(self, p: SpacePoint, q: SpacePoint, r: SpacePoint, s: SpacePoint) -> int:
        """Length of [p, q] ∩ [r, s]."""
        d_pq, d_rs = self.dist(p, q), self.dist(r, s)
        straight = self.dist(p, r) + self.dist(q, s)
        crossed = self.dist(p, s) + self.dist(q, r)
        return max(0, (d_pq + d_rs - min(straight, crossed)) // 2)

    # -- isometries ---------------------------------------------------------

    def displacement(self, g: Word, x: Optional[SpacePoint] = None) -> int:
        x = self.base_point if x is None else x
        return self.dist(x, self.translate(g, x))

    def translation_length(self, g: Word, x: Optional[SpacePoint] = None) -> int:
        x = self.base_point if x is None else x
        gx = self.translate(g, x)
        g2x = self.translate(g, gx)
        return max(0, self.dist(x, g2x) - self.dist(x, gx))

    def project_to_axis(self, g: Word, x: SpacePoint, lam: int) -> SpacePoint:
        gx = self.translate(g, x)
        d = self.dist(x, gx)
        return self.point_along(x, gx, (d - lam) // 2)

    def classify(self, g: Word) -> Classification:
        lam = self.translation_length(g)
        if lam == 0:
            return Classification("elliptic", 0, None)
        basepoint = self.project_to_axis(g, self.base_point, lam)
        return Classification("hyperbolic", lam, Axis(g, basepoint, lam))

    def axis(self, g: Word) -> Axis:
        cls = self.classify(g)
        if cls.axis is None:
            raise ValidationException("axis requested for an elliptic element")
        return cls.axis

    def axis_successor(self, axis: Axis, p: SpacePoint) -> SpacePoint:
        return self.first_step(p, self.translate(axis.carrier, p))

    def axis_points(self, axis: Axis, count: int) -> List[SpacePoint]:
        points = [axis.basepoint]
        while len(points) < count:
            points.append(self.axis_successor(axis, points[-1]))
        return points

    def distance_to_axis(self, axis: Axis, y: SpacePoint) -> int:
        return (self.displacement(axis.carrier, y) - axis.translation_length) // 2

    def min_displacement_element(self, g: Word) -> Tuple[int, SpacePoint]:
        """(L(g), witness). Hyperbolic: projection of the base point on the axis;
        elliptic: midpoint of [x, gx], which is fixed."""
        cls = self.classify(g)
        if cls.axis is not None:
            L, witness = cls.translation_length, cls.axis.basepoint
        else:
            x = self.base_point
            gx = self.translate(g, x)
            d = self.dist(x, gx)
            witness = self.point_along(x, gx, d // 2)
            L = self.displacement(g, witness)
        lam = cls.translation_length
        if not (lam <= L <= lam + 7 * self.delta):
            raise InvariantViolation("lambda <= L <= lambda + 7 delta", f"L={L}", f"lambda={lam}")
        return L, witness

    def joint_displacement(self, elements: Sequence[Word], start: Optional[SpacePoint] = None) -> Tuple[int, SpacePoint]:
        """(L(S), y) by descent.

        max_s d(x, s x) is convex along geodesics, and only a first step toward
        some s·x can lower it, so a point no such step improves is a global minimum.
        """
        if not elements:
            raise ValidationException("joint_displacement needs a non-empty set")
        x = self.base_point if start is None else start
        value = self._max_displacement(elements, x)
        while value > 0:
            best: Optional[Tuple[int, tuple, int, SpacePoint]] = None
            for s in elements:
                sx = self.translate(s, x)
                if sx == x:
                    continue
                cand = self.first_step(x, sx)
                cand_value = self._max_displacement(elements, cand)
                key = (cand_value, shortlex_key(cand.address), -1 if cand.vertex is None else cand.vertex, cand)
                if best is None or key[:3] < best[:3]:
                    best = key
            if best is None or best[0] >= value:
                break
            value, x = best[0], best[3]
        return value, x

    def _max_displacement(self, elements: Sequence[Word], x: SpacePoint) -> int:
        return max(self.displacement(s, x) for s in elements)

    def commute(self, g: Word, h: Word) -> bool:
        return multiply(g, h, self.model) == multiply(h, g, self.model)

    def axes_overlap(self, g: Word, other: Axis, r: int = 0) -> Union[int, Parallel]:
        """Diameter of other ∩ N_r(axis(g)); PARALLEL when the axes coincide.

        Edge stabilizers are trivial in every supported tree, so two hyperbolic
        elements have the same axis iff they commute.
        """
        lam_g = self.translation_length(g)
        lam_c = other.translation_length
        if lam_g == 0 or lam_c == 0:
            raise ValidationException("axes_overlap needs hyperbolic carriers")
        c = other.carrier
        if self.commute(g, c):
            return PARALLEL
        q = other.basepoint
        p1 = self.project_to_axis(g, q, lam_g)
        gap = (self.displacement(c, p1) - lam_c) // 2
        if gap > 0:
            return 2 * (r - gap) if gap <= r else 0
        reach = 2 * (lam_g + lam_c + r) + 2
        kg = -(-reach // lam_g)
        kc = -(-reach // lam_c)
        a0 = self.translate(power(g, -kg, self.model), p1)
        a1 = self.translate(power(g, kg, self.model), p1)
        b0 = self.translate(power(c, -kc, self.model), p1)
        b1 = self.translate(power(c, kc, self.model), p1)
        return self.segment_overlap(a0, a1, b0, b1) + 2 * r

    def translate_axis(self, h: Word, axis: Axis) -> Axis:
        """h(axis) = axis of h g h⁻¹"""
        carrier = multiply(multiply(h, axis.carrier, self.model), invert(h, self.model), self.model)
        return Axis(carrier, self.translate(h, axis.basepoint), axis.translation_length)

    # -- germs --------------------------------------------------------------

    def germ_of(self, x: SpacePoint, y: SpacePoint, scale: int) -> Germ:
        if self.dist(x, y) < 10 * scale:
            return Germ(x, None, scale)
        return Germ(x, self.point_along(x, y, 10 * scale), scale)

    def translate_germ(self, g: Word, germ: Germ) -> Germ:
        endpoint = None if germ.endpoint is None else self.translate(g, germ.endpoint)
        return Germ(self.translate(g, germ.origin), endpoint, germ.scale)

    def _germ_distances(self, a: Germ, b: Germ) -> Tuple[int, int, int]:
        if a.empty or b.empty:
            raise GermComparisonException("cannot compare an empty germ")
        if a.origin != b.origin:
            raise GermComparisonException("germs have different origins")
        if a.scale != b.scale:
            raise GermComparisonException(f"germs have different scales ({a.scale} vs {b.scale})")
        return (
            self.dist(a.origin, a.endpoint),
            self.dist(b.origin, b.endpoint),
            self.dist(a.endpoint, b.endpoint),
        )

    def germ_equivalent(self, a: Germ, b: Germ) -> bool:
        da, db, dab = self._germ_distances(a, b)
        return dab <= da + db - 8 * a.scale

    def germ_opposite(self, a: Germ, b: Germ) -> bool:
        da, db, dab = self._germ_distances(a, b)
        return dab >= da + db - 4 * a.scale

    # -- local structure ----------------------------------------------------

    def _factor_elements(self, pos: int) -> List[Word]:
        factor = self.layout.factors[pos]
        if factor.kind == FactorKind.BAUMSLAG_SOLITAR or factor.order is None:
            raise ValidationException(f"factor {pos} of {self.model.name} is not locally finite")
        letter = factor.generators[0] + 1
        return [(letter,) * e for e in range(factor.order)]

    def neighbors(self, x: SpacePoint) -> List[SpacePoint]:
        model = self.model
        out: List[SpacePoint] = []
        if self.half_scale:
            other = [f for f in self.layout.vertex_factors if f != x.vertex]
            for a in self._factor_elements(x.vertex):
                ca = multiply(x.address, a, model)
                for f in other:
                    out.append(SpacePoint(strip_trailing_factor(ca, f, model), f))
            return out
        if x.vertex is None:
            for pos, factor in enumerate(self.layout.factors):
                if factor.is_loop:
                    letter = factor.generators[0] + 1
                    out.append(SpacePoint(multiply(x.address, (letter,), model)))
                    out.append(SpacePoint(multiply(x.address, (-letter,), model)))
                else:
                    out.append(SpacePoint(strip_trailing_factor(x.address, pos, model), pos))
            return out
        for a in self._factor_elements(x.vertex):
            out.append(SpacePoint(multiply(x.address, a, model)))
        return out


    def element_ball(self, radius: int) -> List[Word]:
        """Elements of word length <= radius in the standard generators (shortlex order)."""
        gens = make_generating_set(self.model, self.model.standard_generators())
        lengths = power_set_lengths(gens, max(radius, 1))
        return sorted((w for w, n in lengths.items() if n <= radius), key=shortlex_key)

    def _max_syllable(self) -> int:
        longest = 1
        for factor in self.layout.factors:
            if factor.order is not None:
                longest = max(longest, factor.order - 1)
        return longest

    def near_stabilizer(self, x: SpacePoint, epsilon: int) -> List[Word]:
        """All h with d(x, h x) <= ε (exact for locally finite trees)."""
        anchor = SpacePoint((), x.vertex)
        radius = (epsilon + 2) * self._max_syllable() + epsilon
        local = [k for k in self.element_ball(radius) if self.dist(anchor, self.translate(k, anchor)) <= epsilon]
        c = x.address
        c_inv = invert(c, self.model)
        return [multiply(multiply(c, k, self.model), c_inv, self.model) for k in local]

    # -- estimators ---------------------------------------------------------

    def four_point_delta(self, points: Sequence[SpacePoint], samples: int, seed: int) -> Fraction:
        """max over sampled quadruples of (largest - middle pair sum) / 2."""
        if len(points) < 4:
            return Fraction(0)
        rng = np.random.default_rng(seed)
        worst = Fraction(0)
        for _ in range(samples):
            x, y, z, w = (points[int(i)] for i in rng.choice(len(points), size=4, replace=False))
            sums = sorted(
                (
                    self.dist(x, y) + self.dist(z, w),
                    self.dist(x, z) + self.dist(y, w),
                    self.dist(x, w) + self.dist(y, z),
                ),
                reverse=True,
            )
            worst = max(worst, Fraction(sums[0] - sums[1], 2))
        return worst

    def orbit_sample(self, radius: int) -> List[SpacePoint]:
        return [self.point(g) for g in self.element_ball(radius)]

    def hyperbolic_elements(self, radius: int) -> List[Word]:
        return [g for g in self.element_ball(radius) if g and self.translation_length(g) > 0]

    def wpd_count(self, g: Word, x: SpacePoint, D: int, epsilon: int) -> int:
        far = self.translate(power(g, D, self.model), x)
        return sum(
            1 for h in self.near_stabilizer(x, epsilon) if self.dist(far, self.translate(h, far)) <= epsilon
        )

    def estimate_uniform_wpd_D(
        self,
        epsilon: int,
        samples: int = 32,
        radius: int = 3,
        seed: int = 0,
        max_D: int = 32,
    ) -> int:
        """Smallest D with #{h : d(x,hx) <= ε, d(g^D x, h g^D x) <= ε} <= D over the sampled (g, x).

        The count depends on D through g^D, so the max count alone does not fix D; the
        returned value is the least D that bounds its own max count. It is a lower bound
        for the true constant. x runs over axis points of sampled hyperbolic g.
        """
        if epsilon < 0:
            raise ValidationException("epsilon must be non-negative")
        candidates = self.hyperbolic_elements(radius)
        if not candidates:
            raise ValidationException(f"no hyperbolic element of length <= {radius} in {self.model.name}")
        rng = np.random.default_rng(seed)
        pairs: List[Tuple[Word, SpacePoint]] = []
        for _ in range(samples):
            g = candidates[int(rng.integers(len(candidates)))]
            axis = self.axis(g)
            steps = int(rng.integers(axis.translation_length))
            pairs.append((g, self.axis_points(axis, steps + 1)[-1]))
        for D in range(1, max_D + 1):
            worst = max(self.wpd_count(g, x, D, epsilon) for g, x in pairs)
            if worst <= D:
                logger.info(f"[WPD] model={self.model.name} epsilon={epsilon} D={D} samples={len(pairs)}")
                return D
        raise CapExceededException("no uniform-WPD constant found below the sample cap", max_D)

    def estimate_acylindricity(
        self,
        epsilon: int,
        R: int,
        samples: int = 32,
        radius: int = 3,
        seed: int = 0,
    ) -> Dict[str, int]:
        """N = max #{h : d(x,hx) <= ε, d(y,hy) <= ε} over sampled d(x,y) >= R,
        K = ⌈R / T⌉ with T the integer lower bound on λ, D = max(K, N)."""
        if R < 1:
            raise ValidationException("R must be positive")
        rng = np.random.default_rng(seed)
        elements = self.element_ball(radius)
        pairs: List[Tuple[SpacePoint, SpacePoint]] = []
        attempts = 0
        while len(pairs) < samples and attempts < 50 * samples:
            attempts += 1
            x = self.point(elements[int(rng.integers(len(elements)))])
            g = elements[int(rng.integers(len(elements)))]
            y = self.translate(power(g, R, self.model), x)
            if self.dist(x, y) >= R:
                pairs.append((x, y))
        if not pairs:
            raise CapExceededException("no point pair at distance >= R was sampled", 50 * samples)
        N = 0
        for x, y in pairs:
            count = sum(1 for h in self.near_stabilizer(x, epsilon) if self.dist(y, self.translate(h, y)) <= epsilon)
            N = max(N, count)
        # λ는 정수이므로 δ = 0에서도 T >= 1
        T = max(Fraction(50) * self.delta / max(N, 1), Fraction(1))
        K = math.ceil(Fraction(R) / T)
        return {"epsilon": epsilon, "R": R, "N": N, "K": K, "D": max(K, N), "samples": len(pairs)}
