"""Homomorphism sequences F_ℓ → G: stable kernel, factoring and growth continuity.

Every classification here is a claim at the sampled horizon, never a proof.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence

from ..constants import DEFAULT_CAP, DEFAULT_SHARDS
from ..dto import ContinuityReport, ContinuityRow, FactoringReport, GrowthTable, StableKernelReport, WordClassification
from ..exceptions import InvariantViolation, ValidationException
from ..models import GeneratingSet, GroupModel, Homomorphism, Word
from ..word_service import evaluate, format_word, image_set, make_homomorphism, parse_template
from .construction_service import reduced_words
from .growth_service import certified_upper, enumerate_balls, growth_estimate

logger = logging.getLogger(__name__)

EVENTUALLY_TRIVIAL = "eventually_trivial"
EVENTUALLY_NONTRIVIAL = "eventually_nontrivial"
UNDECIDED = "undecided"


class HomomorphismSequence:
    """n ↦ f_n : F_arity → target. Surjectivity of f_n is an assumption, not checked."""

    def __init__(self, arity: int, target: GroupModel, rule: Callable[[int], Sequence[Word]], description: str = ""):
        if arity < 1:
            raise ValidationException("sequence arity must be positive")
        self.arity = arity
        self.target = target
        self.rule = rule
        self.description = description
        self.source = GroupModel.free_group(arity)

    @classmethod
    def from_templates(cls, target: GroupModel, templates: Sequence[str]) -> "HomomorphismSequence":
        """Images as word templates with an n-exponent, e.g. ``a`` and ``A^n b a^n``."""
        if not templates:
            raise ValidationException("a sequence needs at least one image template")
        parsed = [parse_template(text, target) for text in templates]
        return cls(
            arity=len(parsed),
            target=target,
            rule=lambda n: [t.instantiate(n) for t in parsed],
            description="; ".join(templates),
        )

    def at(self, n: int) -> Homomorphism:
        if n < 1:
            raise ValidationException(f"sequence index must be >= 1, got {n}")
        images = list(self.rule(n))
        if len(images) != self.arity:
            raise ValidationException(f"rule gave {len(images)} images for arity {self.arity}")
        return make_homomorphism(self.target, images)


def geometric_samples(horizon: int) -> List[int]:
    """1, 2, 4, ... up to the horizon, which is always included."""
    if horizon < 1:
        raise ValidationException("horizon must be >= 1")
    samples = []
    n = 1
    while n < horizon:
        samples.append(n)
        n *= 2
    samples.append(horizon)
    return samples


def classify_history(history: Sequence[bool], samples: Sequence[int]) -> WordClassification:
    """history[i]: f_{samples[i]}(w) is trivial. The last two samples decide."""
    flips = 0
    last_flip: Optional[int] = None
    for i in range(1, len(history)):
        if history[i] != history[i - 1]:
            flips += 1
            last_flip = samples[i]
    window = history[-2:]
    if all(window):
        status = EVENTUALLY_TRIVIAL
    elif not any(window):
        status = EVENTUALLY_NONTRIVIAL
    else:
        status = UNDECIDED
    return WordClassification(word="", status=status, flips=flips, last_flip=last_flip)


def stable_kernel_scan(seq: HomomorphismSequence, length_cap: int, horizon: int, shards: int = DEFAULT_SHARDS) -> StableKernelReport:
    if length_cap < 1:
        raise ValidationException("length cap must be >= 1")
    samples = geometric_samples(horizon)
    maps = [seq.at(n) for n in samples]
    words = list(reduced_words(seq.arity, length_cap))

    def classify(word: Word) -> WordClassification:
        history = [not evaluate(f, word) for f in maps]
        row = classify_history(history, samples)
        return row.model_copy(update={"word": format_word(word, seq.source)})

    if shards > 1:
        with ThreadPoolExecutor(max_workers=shards) as pool:
            rows = list(pool.map(classify, words))
    else:
        rows = [classify(w) for w in words]
    counts = {status: sum(1 for r in rows if r.status == status) for status in (EVENTUALLY_TRIVIAL, EVENTUALLY_NONTRIVIAL, UNDECIDED)}
    logger.info(f"[LIMIT] stable kernel L={length_cap} N={horizon} words={len(rows)} {counts}")
    return StableKernelReport(length_cap=length_cap, horizon=horizon, samples=samples, rows=rows)


def factoring_check(seq: HomomorphismSequence, relations: Sequence[Word], horizon: int) -> FactoringReport:
    """Least sampled n0 with every relation dead under f_n for all sampled n >= n0, or None."""
    samples = geometric_samples(horizon)
    names = [format_word(r, seq.source) for r in relations]
    if not relations:
        return FactoringReport(relations=names, horizon=horizon, n0=1)
    dead = [all(not evaluate(seq.at(n), r) for r in relations) for n in samples]
    n0: Optional[int] = None
    for i in range(len(samples) - 1, -1, -1):
        if not dead[i]:
            break
        n0 = samples[i]
    logger.info(f"[LIMIT] factoring relations={len(relations)} N={horizon} n0={n0}")
    return FactoringReport(relations=names, horizon=horizon, n0=n0)


def check_ball_domination(image: GrowthTable, source: GrowthTable, witness: str = "") -> bool:
    """β_k(image) <= β_k(source) for every common k; returns whether it is strict somewhere."""
    strict = False
    for k, (lhs, rhs) in enumerate(zip(image.ball, source.ball)):
        if lhs > rhs:
            raise InvariantViolation("beta_k(image) <= beta_k(source)", lhs, rhs, f"k={k} {witness}".strip())
        strict = strict or lhs < rhs
    return strict


def growth_continuity_probe(
    seq: HomomorphismSequence,
    S: GeneratingSet,
    limit_model: Optional[GroupModel],
    eta_images: Optional[Sequence[Word]],
    depth: int,
    horizon: int,
    cap: int = DEFAULT_CAP,
    shards: int = DEFAULT_SHARDS,
) -> ContinuityReport:
    """S is a set of words in F_arity; the limit L and η are supplied, never inferred."""
    if limit_model is None or eta_images is None:
        raise ValidationException("growth_continuity_probe needs an explicit limit model and eta images")
    if S.model != seq.source:
        raise ValidationException(f"S must live in {seq.source.name}, got {S.model.name}")
    eta = make_homomorphism(limit_model, eta_images)
    if eta.source_arity != seq.arity:
        raise ValidationException(f"eta has {eta.source_arity} images for arity {seq.arity}")

    limit_table = enumerate_balls(image_set(eta, S), depth, cap, shards)
    limit_estimate = growth_estimate(limit_table)
    rows: List[ContinuityRow] = []
    strict = False
    for n in geometric_samples(horizon):
        table = enumerate_balls(image_set(seq.at(n), S), depth, cap, shards)
        strict_here = check_ball_domination(table, limit_table, f"n={n}")
        strict = strict or strict_here
        upper, _ = certified_upper(table)
        rows.append(
            ContinuityRow(
                n=n,
                ball=table.ball,
                point_estimate=growth_estimate(table).point_estimate,
                certified_upper=upper,
                inequality_holds=True,
            )
        )
        logger.info(f"[LIMIT] continuity n={n} beta_{depth}={table.ball[-1]} limit={limit_table.ball[-1]}")
    return ContinuityReport(
        limit_ball=limit_table.ball,
        limit_point_estimate=limit_estimate.point_estimate,
        limit_certified_upper=limit_estimate.certified_upper,
        rows=rows,
        strict_somewhere=strict,
    )
