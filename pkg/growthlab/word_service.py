"""Normal forms, products, parsing and homomorphism evaluation for the supported group models.

Letters are signed integers: generator i is ``i + 1``, its inverse ``-(i + 1)``.
Canonical forms:

* cyclic factors of finite order n: a syllable is ``e`` copies of the positive letter, 1 <= e < n;
* infinite cyclic factors: a syllable is a run of one signed letter (free reduction);
* the Baumslag–Solitar factor ⟨a, t | t a^p t^-1 = a^q⟩: Britton normal form
  ``a^r1 t^e1 a^r2 t^e2 ... a^n`` with 0 <= r_i < q when e_i = +1 and 0 <= r_i < p when e_i = -1.

Consecutive syllables always belong to different factors.
"""
import hashlib
import logging
import re
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .constants import DEFAULT_POWER_CAP, WORD_ECHO_LIMIT
from .exceptions import CapExceededException, ValidationException, WordParseException
from .models import (
    IDENTITY,
    Factor,
    FactorKind,
    GeneratingSet,
    GroupModel,
    Homomorphism,
    ModelKind,
    Word,
    shortlex_key,
)

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# normal forms
# ---------------------------------------------------------------------------

def free_reduce(word: Sequence[int]) -> Word:
    out: List[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


class _BSState:
    """Britton normal form under construction: stack of (r, ε) and trailing a-exponent."""
    __slots__ = ("stack", "n")

    def __init__(self) -> None:
        self.stack: List[Tuple[int, int]] = []
        self.n = 0

    def push_t(self, sign: int, p: int, q: int) -> None:
        stack = self.stack
        if stack and stack[-1][1] == -sign:
            r_prev, eps_prev = stack[-1]
            if eps_prev == 1 and self.n % p == 0:
                # t a^(pk) t^-1 = a^(qk)
                stack.pop()
                self.n = r_prev + q * (self.n // p)
                return
            if eps_prev == -1 and self.n % q == 0:
                # t^-1 a^(qk) t = a^(pk)
                stack.pop()
                self.n = r_prev + p * (self.n // q)
                return
        if sign == 1:
            m, r = divmod(self.n, q)
            stack.append((r, 1))
            self.n = p * m
        else:
            m, r = divmod(self.n, p)
            stack.append((r, -1))
            self.n = q * m

    def is_trivial(self) -> bool:
        return not self.stack and self.n == 0

    def render(self, a: int, t: int) -> Word:
        out: List[int] = []
        for r, eps in self.stack:
            out.extend((a,) * r)
            out.append(t if eps == 1 else -t)
        if self.n > 0:
            out.extend((a,) * self.n)
        elif self.n < 0:
            out.extend((-a,) * (-self.n))
        return tuple(out)


def _render_cyclic(gen_letter: int, exponent: int, order: Optional[int]) -> Word:
    if order is not None:
        exponent %= order
        return (gen_letter,) * exponent
    if exponent >= 0:
        return (gen_letter,) * exponent
    return (-gen_letter,) * (-exponent)


def normalize(word: Sequence[int], model: GroupModel) -> Word:
    """Return the unique canonical form of ``word``."""
    layout = model.layout()
    arity = len(layout.factor_of)
    for x in word:
        if x == 0 or abs(x) > arity:
            raise ValidationException(f"letter {x} is not valid for {model.name}")
    if layout.all_loops:
        return free_reduce(word)

    # 음절 스택: [factor 위치, 상태]
    stack: List[list] = []
    for x in word:
        g = abs(x) - 1
        pos = layout.factor_of[g]
        factor = layout.factors[pos]
        sign = 1 if x > 0 else -1
        if stack and stack[-1][0] == pos:
            syllable = stack[-1]
        else:
            syllable = [pos, _BSState() if factor.kind == FactorKind.BAUMSLAG_SOLITAR else 0]
            stack.append(syllable)
        if factor.kind == FactorKind.BAUMSLAG_SOLITAR:
            state: _BSState = syllable[1]
            if g == factor.generators[0]:
                state.n += sign
            else:
                state.push_t(sign, factor.p, factor.q)
            trivial = state.is_trivial()
        else:
            exponent = syllable[1] + sign
            if factor.order is not None:
                exponent %= factor.order
            syllable[1] = exponent
            trivial = exponent == 0
        if trivial:
            stack.pop()

    out: List[int] = []
    for pos, state in stack:
        factor = layout.factors[pos]
        out.extend(_render_syllable(factor, state))
    return tuple(out)


def _render_syllable(factor: Factor, state) -> Word:
    if factor.kind == FactorKind.BAUMSLAG_SOLITAR:
        return state.render(factor.generators[0] + 1, factor.generators[1] + 1)
    return _render_cyclic(factor.generators[0] + 1, state, factor.order)


def _junction_product(u: Word, v: Word, model: GroupModel) -> Word:
    """Product of canonical words in a model whose factors are all cyclic.

    Only the syllables meeting at the junction can interact, so the cost is
    proportional to the cancellation plus the copy.
    """
    layout = model.layout()
    i, j = len(u), 0
    nv = len(v)
    while i > 0 and j < nv:
        gu, gv = abs(u[i - 1]), abs(v[j])
        if gu != gv:
            break
        order = layout.factors[layout.factor_of[gu - 1]].order
        i0 = i - 1
        last = u[i - 1]
        while i0 > 0 and u[i0 - 1] == last:
            i0 -= 1
        j1 = j + 1
        first = v[j]
        while j1 < nv and v[j1] == first:
            j1 += 1
        exponent = (i - i0) * (1 if last > 0 else -1) + (j1 - j) * (1 if first > 0 else -1)
        if order is not None:
            exponent %= order
        if exponent == 0:
            i, j = i0, j1
            continue
        return u[:i0] + _render_cyclic(gu, exponent, order) + v[j1:]
    return u[:i] + v[j:]


def multiply(u: Word, v: Word, model: GroupModel) -> Word:
    """Canonical form of u·v for canonical u, v."""
    if not u:
        return v
    if not v:
        return u
    if model.layout().all_loops:
        i, j = len(u), 0
        nv = len(v)
        while i > 0 and j < nv and u[i - 1] == -v[j]:
            i -= 1
            j += 1
        return u[:i] + v[j:]
    if model.kind == ModelKind.BS_FREE_PRODUCT:
        return normalize(u + v, model)
    return _junction_product(u, v, model)


def invert(u: Word, model: GroupModel) -> Word:
    reversed_word = tuple(-x for x in reversed(u))
    if model.layout().all_loops:
        return reversed_word
    return normalize(reversed_word, model)


def product(words: Iterable[Word], model: GroupModel) -> Word:
    result: Word = IDENTITY
    for w in words:
        result = multiply(result, w, model)
    return result


def power(u: Word, exponent: int, model: GroupModel) -> Word:
    if exponent < 0:
        u = invert(u, model)
        exponent = -exponent
    result: Word = IDENTITY
    base = u
    while exponent:
        if exponent & 1:
            result = multiply(result, base, model)
        exponent >>= 1
        if exponent:
            base = multiply(base, base, model)
    return result


def conjugate(g: Word, by: Word, model: GroupModel) -> Word:
    """by · g · by⁻¹"""
    return multiply(multiply(by, g, model), invert(by, model), model)


def commutator(u: Word, v: Word, model: GroupModel) -> Word:
    """[u, v] = u v u⁻¹ v⁻¹"""
    return product([u, v, invert(u, model), invert(v, model)], model)


def syllables(word: Word, model: GroupModel) -> List[Tuple[int, int, int]]:
    """(factor 위치, 시작, 끝) 목록. 무한 순환 인자는 같은 문자 연속이 한 음절."""
    layout = model.layout()
    out: List[Tuple[int, int, int]] = []
    start = 0
    n = len(word)
    while start < n:
        pos = layout.factor_of[abs(word[start]) - 1]
        end = start + 1
        while end < n and layout.factor_of[abs(word[end]) - 1] == pos:
            end += 1
        out.append((pos, start, end))
        start = end
    return out


def strip_trailing_factor(word: Word, factor_pos: int, model: GroupModel) -> Word:
    """Coset representative of word·A_f: drop a trailing syllable of factor f."""
    if not word:
        return word
    layout = model.layout()
    i = len(word)
    while i > 0 and layout.factor_of[abs(word[i - 1]) - 1] == factor_pos:
        i -= 1
    return word[:i]


# ---------------------------------------------------------------------------
# formatting and parsing
# ---------------------------------------------------------------------------

def _symbol(letter: int, model: GroupModel) -> str:
    sym = model.layout().symbols[abs(letter) - 1]
    return sym if letter > 0 else sym.upper()


def format_word(word: Word, model: GroupModel, compact: bool = True) -> str:
    if not word:
        return "1"
    parts: List[str] = []
    i = 0
    n = len(word)
    while i < n:
        j = i + 1
        while j < n and word[j] == word[i]:
            j += 1
        run = j - i
        sym = _symbol(word[i], model)
        if compact and run >= 3:
            parts.append(f"{sym}^{run}")
        else:
            parts.append(sym * run)
        i = j
    return "".join(parts)


def word_summary(word: Word, model: GroupModel) -> str:
    """결과 레코드용 단어 표기. 긴 단어는 앞부분 + 길이 + sha1 요약."""
    text = format_word(word, model)
    if len(text) <= WORD_ECHO_LIMIT:
        return text
    digest = hashlib.sha1(text.encode("utf-8")).hexdigest()[:12]
    return f"{text[:24]}...(len={len(word)}, sha1={digest})"


_TERM_RE = re.compile(r"([+-]?)(\d*)(n?)")


class WordTemplate:
    """Word with exponents linear in n, e.g. ``A^n b a^n`` or ``a^(2n-1) b``."""

    def __init__(self, text: str, model: GroupModel, tokens: List[Tuple[int, int, int]]):
        self.text = text
        self.model = model
        # (letter, n 계수, 상수)
        self.tokens = tokens

    @property
    def uses_n(self) -> bool:
        return any(coef != 0 for _, coef, _ in self.tokens)

    def instantiate(self, n: int) -> Word:
        letters: List[int] = []
        for letter, coef, const in self.tokens:
            exponent = coef * n + const
            if exponent >= 0:
                letters.extend((letter,) * exponent)
            else:
                letters.extend((-letter,) * (-exponent))
        return normalize(letters, self.model)


def _parse_linear(text: str, expr: str, offset: int, allow_n: bool) -> Tuple[int, int]:
    """'2n-1', '-n', '3' 같은 선형식을 (계수, 상수)로"""
    coef = const = 0
    pos = 0
    expr_body = expr.replace(" ", "")
    if not expr_body:
        raise WordParseException(text, offset, "empty exponent")
    while pos < len(expr_body):
        match = _TERM_RE.match(expr_body, pos)
        if match is None or match.end() == pos:
            raise WordParseException(text, offset + pos, "malformed exponent")
        sign_txt, digits, n_txt = match.groups()
        if not digits and not n_txt:
            raise WordParseException(text, offset + pos, "malformed exponent")
        if pos > 0 and not sign_txt:
            raise WordParseException(text, offset + pos, "missing operator in exponent")
        sign = -1 if sign_txt == "-" else 1
        value = int(digits) if digits else 1
        if n_txt:
            if not allow_n:
                raise WordParseException(text, offset + pos, "exponent 'n' is only allowed in templates")
            coef += sign * value
        else:
            const += sign * value
        pos = match.end()
    return coef, const


def parse_template(text: str, model: GroupModel, allow_n: bool = True) -> WordTemplate:
    symbols = model.layout().symbols
    index: Dict[str, int] = {}
    for i, sym in enumerate(symbols):
        index[sym] = i + 1
        index[sym.upper()] = -(i + 1)
    tokens: List[Tuple[int, int, int]] = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch in " \t·*.":
            pos += 1
            continue
        if ch == "1" and not tokens and text.strip() == "1":
            break
        if ch not in index:
            raise WordParseException(text, pos, f"unknown symbol '{ch}' for {model.name}")
        letter = index[ch]
        pos += 1
        coef, const = 0, 1
        if pos < n and text[pos] == "^":
            pos += 1
            if pos < n and text[pos] == "(":
                close = text.find(")", pos)
                if close < 0:
                    raise WordParseException(text, pos, "unclosed '('")
                coef, const = _parse_linear(text, text[pos + 1:close], pos + 1, allow_n)
                pos = close + 1
            else:
                match = re.compile(r"-?\d*n?").match(text, pos)
                body = match.group(0) if match else ""
                if body in ("", "-"):
                    raise WordParseException(text, pos, "missing exponent after '^'")
                coef, const = _parse_linear(text, body, pos, allow_n)
                pos = match.end()
        tokens.append((letter, coef, const))
    return WordTemplate(text, model, tokens)


def parse_word(text: str, model: GroupModel) -> Word:
    """'aB', 'a^3 b', 'A^2ba', '1' 등을 정규형 단어로"""
    return parse_template(text, model, allow_n=False).instantiate(0)


def parse_words(text: str, model: GroupModel) -> List[Word]:
    words: List[Word] = []
    offset = 0
    for chunk in text.split(","):
        if not chunk.strip():
            raise WordParseException(text, offset, "empty word in list")
        try:
            words.append(parse_word(chunk, model))
        except WordParseException as e:
            raise WordParseException(text, offset + e.position, str(e.message).split(" at position")[0]) from e
        offset += len(chunk) + 1
    return words


# ---------------------------------------------------------------------------
# generating sets
# ---------------------------------------------------------------------------

def make_generating_set(model: GroupModel, words: Iterable[Sequence[int]], symmetric: bool = False) -> GeneratingSet:
    seen = set()
    elements: List[Word] = []
    for w in words:
        canonical = normalize(w, model)
        if not canonical:
            logger.info("[GENSET] identity element dropped")
            continue
        if canonical in seen:
            continue
        seen.add(canonical)
        elements.append(canonical)
    gens = GeneratingSet(model=model, elements=tuple(elements), symmetrized=False)
    return symmetrize(gens) if symmetric else gens


def require_non_empty(S: GeneratingSet, where: str) -> None:
    if not S.elements:
        raise ValidationException(f"{where}: generating set is empty after normalization")


def symmetrize(S: GeneratingSet) -> GeneratingSet:
    if S.symmetrized:
        return S
    model = S.model
    closed = set(S.elements)
    for w in S.elements:
        closed.add(invert(w, model))
    closed.discard(IDENTITY)
    return GeneratingSet(model=model, elements=tuple(sorted(closed, key=shortlex_key)), symmetrized=True)


def power_set_lengths(S: GeneratingSet, k: int, cap: int = DEFAULT_POWER_CAP) -> Dict[Word, int]:
    """S^k (대칭화된 S의 원소 k개 이하의 곱)과 각 원소의 최소 S-길이. 항등원 포함."""
    if k < 1:
        raise ValidationException(f"power must be >= 1, got {k}")
    require_non_empty(S, "power_set")
    model = S.model
    letters = symmetrize(S).elements
    lengths: Dict[Word, int] = {IDENTITY: 0}
    frontier: List[Word] = [IDENTITY]
    for level in range(1, k + 1):
        nxt: List[Word] = []
        for g in frontier:
            for s in letters:
                h = multiply(g, s, model)
                if h not in lengths:
                    lengths[h] = level
                    nxt.append(h)
                    if len(lengths) - 1 > cap:
                        raise CapExceededException(f"|S^{k}| exceeds the configured cap", cap)
        frontier = nxt
    return lengths


def power_set(S: GeneratingSet, k: int, cap: int = DEFAULT_POWER_CAP) -> GeneratingSet:
    lengths = power_set_lengths(S, k, cap)
    elements = sorted((w for w in lengths if w), key=shortlex_key)
    logger.debug(f"[GENSET] |S^{k}| = {len(elements)}")
    return GeneratingSet(model=S.model, elements=tuple(elements), symmetrized=True)


# ---------------------------------------------------------------------------
# homomorphisms
# ---------------------------------------------------------------------------

def make_homomorphism(target: GroupModel, images: Sequence[Sequence[int]]) -> Homomorphism:
    return Homomorphism(
        source_arity=len(images),
        target=target,
        images=tuple(normalize(w, target) for w in images),
    )


def evaluate(h: Homomorphism, w: Sequence[int]) -> Word:
    """Image of the free-group word w; letters of w index the source generators."""
    target = h.target
    inverses: Dict[int, Word] = {}
    result: Word = IDENTITY
    for x in w:
        i = abs(x) - 1
        if i >= h.source_arity:
            raise ValidationException(f"letter {x} exceeds source arity {h.source_arity}")
        if x > 0:
            image = h.images[i]
        else:
            if i not in inverses:
                inverses[i] = invert(h.images[i], target)
            image = inverses[i]
        result = multiply(result, image, target)
    return result


def image_set(h: Homomorphism, S: GeneratingSet) -> GeneratingSet:
    return make_generating_set(h.target, [evaluate(h, w) for w in S.elements])
