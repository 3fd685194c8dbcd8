"""Moodle embedded-answer (CLOZE) subquestions: encode, parse, grade.

Wire syntax: `{points:KIND:answerspec}` with answers separated by `~`,
weight prefix `%w%`, and for numeric answers a `:tolerance` suffix.
Kinds: NM (numerical), MC (drop-down multiple choice), SA (short answer,
case-insensitive), SAC (short answer, case-sensitive).

Grading notes:
  * When several answers match, the maximum matching weight wins.  Moodle's
    own first-match behavior is not replicated; callers needing bit-identical
    Moodle scores should order answers accordingly.
  * The `=answer` shorthand is accepted on parse and normalized to the
    canonical `%100%answer:0` form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .numfmt import format_number, parse_number, round_half_away

KINDS = ("NM", "MC", "SA", "SAC")

_KIND_ALIASES = {
    "NM": "NM", "NUMERICAL": "NM",
    "MC": "MC", "MULTICHOICE": "MC",
    "SA": "SA", "SHORTANSWER": "SA", "MW": "SA",
    "SAC": "SAC", "SHORTANSWER_C": "SAC", "MWC": "SAC",
}

# characters that collide with CLOZE syntax inside answer payloads
_SPECIALS = "}~#%"

_HEADER_RE = re.compile(r"\{(\d*):([A-Z_]+):")


class ClozeError(ValueError):
    """Malformed CLOZE string or invalid subquestion."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (at offset {offset})")
        self.offset = offset


@dataclass(frozen=True)
class Answer:
    weight: int
    target: float | str
    tolerance: float | None = None
    feedback: str | None = None


@dataclass(frozen=True)
class SubQuestion:
    kind: str
    points: int
    answers: tuple[Answer, ...]

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ClozeError(f"unknown kind {self.kind!r}")
        if self.points < 1:
            raise ClozeError("points must be a positive integer")
        if not self.answers:
            raise ClozeError("subquestion needs at least one answer")
        object.__setattr__(self, "answers", tuple(self.answers))
        if not any(a.weight == 100 for a in self.answers):
            raise ClozeError("no answer has weight 100")
        for a in self.answers:
            if not isinstance(a.weight, int) or not 0 <= a.weight <= 100:
                raise ClozeError(f"weight {a.weight!r} outside 0..100")
            if self.kind == "NM":
                if not isinstance(a.target, (int, float)) or isinstance(a.target, bool):
                    raise ClozeError("NM answers need a numeric target")
                if a.tolerance is None or a.tolerance < 0:
                    raise ClozeError("NM answers need a tolerance >= 0")
            else:
                if not isinstance(a.target, str) or a.target == "":
                    raise ClozeError(f"{self.kind} answers need nonempty text")
                if a.tolerance is not None:
                    raise ClozeError(f"{self.kind} answers cannot carry a tolerance")


def _escape(text: str) -> str:
    out = []
    for ch in text:
        if ch in _SPECIALS or ch == "\\":
            out.append("\\")
        out.append(ch)
    return "".join(out)


def _answer_token(kind: str, a: Answer) -> str:
    if kind == "NM":
        payload = f"{format_number(float(a.target))}:{format_number(float(a.tolerance))}"
        tok = f"%{a.weight}%{payload}"
    else:
        payload = _escape(str(a.target))
        # SA/SAC omit the redundant %100% prefix (matches hand-written usage)
        if kind in ("SA", "SAC") and a.weight == 100:
            tok = payload
        else:
            tok = f"%{a.weight}%{payload}"
    if a.feedback is not None:
        tok += "#" + _escape(a.feedback)
    return tok


def encode(sub: SubQuestion) -> str:
    """Canonical CLOZE string for a subquestion."""
    toks = [_answer_token(sub.kind, a) for a in sub.answers]
    body = "~".join(toks)
    if sub.kind == "MC":
        body = "~" + body
    return f"{{{sub.points}:{sub.kind}:{body}}}"


def encode_nm(targets, weights, tolerances, points: int = 1) -> str:
    """Numeric subquestion; a single target is broadcast over all weights."""
    targets = list(targets)
    weights = list(weights)
    tolerances = list(tolerances)
    if len(targets) == 1 and len(weights) > 1:
        targets = targets * len(weights)
    if not (len(targets) == len(weights) == len(tolerances)):
        raise ClozeError("targets, weights and tolerances must have equal length")
    answers = [Answer(w, float(t), float(e)) for t, w, e in zip(targets, weights, tolerances)]
    return encode(SubQuestion("NM", points, tuple(answers)))


def encode_nm_digits(target: float, ndigits: int, points: int = 1,
                     partial_weight: int = 80) -> str:
    """Numeric subquestion where the answer must be rounded to ndigits.

    Full credit for the correctly rounded value (within half an ulp one digit
    further out); partial credit for rounding to one digit fewer or one more.
    """
    if ndigits < 0:
        raise ClozeError("ndigits must be >= 0")
    bands = []  # (weight, center, tol)
    for digits, weight in ((ndigits, 100), (ndigits - 1, partial_weight),
                           (ndigits + 1, partial_weight)):
        if digits < 0:
            continue
        center = round_half_away(target, digits)
        tol = 0.5 * 10.0 ** (-digits - 1)
        bands.append((weight, center, tol))
    seen: dict[tuple[str, str], int] = {}
    answers = []
    for weight, center, tol in bands:
        key = (format_number(center), format_number(tol))
        if key in seen:
            continue
        seen[key] = weight
        answers.append(Answer(weight, center, tol))
    return encode(SubQuestion("NM", points, tuple(answers)))


def encode_mc(options, weights, points: int = 1) -> tuple[str, str]:
    """Drop-down subquestion; returns (cloze string, correct option text)."""
    options = list(options)
    weights = list(weights)
    if len(options) != len(weights):
        raise ClozeError("options and weights must have equal length")
    answers = [Answer(w, str(o)) for o, w in zip(options, weights)]
    sub = SubQuestion("MC", points, tuple(answers))
    best = max(sub.answers, key=lambda a: a.weight)
    return encode(sub), str(best.target)


def encode_sa(texts, weights=None, caps_insensitive: bool = True,
              points: int = 1) -> str:
    """Short-answer subquestion with automatic `*` wildcard insertion."""
    texts = list(texts)
    if weights is None:
        weights = [100] * len(texts)
    weights = list(weights)
    if len(texts) != len(weights):
        raise ClozeError("texts and weights must have equal length")
    kind = "SA" if caps_insensitive else "SAC"
    answers = [Answer(w, wildcardize(str(t))) for t, w in zip(texts, weights)]
    return encode(SubQuestion(kind, points, tuple(answers)))


def wildcardize(text: str) -> str:
    """Replace internal whitespace runs with `*` and add `*` at both ends.

    Idempotent, so already wildcarded text passes through unchanged.
    """
    if text == "":
        raise ClozeError("empty answer text")
    out = re.sub(r"\s+", "*", text.strip())
    if not out.startswith("*"):
        out = "*" + out
    if not out.endswith("*"):
        out += "*"
    return out


def builtin_mc_options(index: int) -> list[str]:
    """The eleven predefined multiple-choice option sets."""
    sets = [
        ["lower", "not equal to", "higher", "can't tell"],
        ["lower", "not equal to", "higher"],
        ["is statistically significant", "is not statistically significant"],
        ["is statistically significant", "is not statistically significant", "can't tell"],
        ["is", "is not"],
        ["Male", "Female"],
        ["true", "false"],
        ["has", "does not have"],
        ["\\(\\ne\\)", "\\(<\\)", "\\(>\\)", "can't tell"],
        ["\\(\\ne\\)", "\\(<\\)", "\\(>\\)"],
        ["\\(\\mu\\)", "\\(\\pi\\)", "\\(\\sigma\\)", "\\(\\lambda\\)", "\\(\\rho\\)", "other"],
    ]
    if not 1 <= index <= len(sets):
        raise ClozeError(f"builtin option set index {index} outside 1..{len(sets)}")
    return list(sets[index - 1])


# ---------------------------------------------------------------------------
# parsing

def _split_unescaped(body: str, sep: str) -> list[str]:
    parts = [""]
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\" and i + 1 < len(body):
            parts[-1] += body[i:i + 2]
            i += 2
            continue
        if ch == sep:
            parts.append("")
        else:
            parts[-1] += ch
        i += 1
    return parts


def _unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        if text[i] == "\\" and i + 1 < len(text) and text[i + 1] in _SPECIALS + "\\":
            out.append(text[i + 1])
            i += 2
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def _parse_answer(tok: str, kind: str, offset: int) -> Answer:
    feedback = None
    pieces = _split_unescaped(tok, "#")
    if len(pieces) > 1:
        tok = pieces[0]
        feedback = _unescape("#".join(pieces[1:]))
    weight = None
    if tok.startswith("="):
        weight = 100
        tok = tok[1:]
    else:
        m = re.match(r"%(-?\d+)%", tok)
        if m:
            weight = int(m.group(1))
            tok = tok[m.end():]
        elif tok.startswith("%"):
            raise ClozeError(f"malformed weight in answer {tok!r}", offset)
    if weight is None:
        weight = 100
    if kind == "NM":
        num, _, tol = tok.partition(":")
        target = parse_number(num)
        if target is None:
            raise ClozeError(f"NM answer target {num!r} is not numeric", offset)
        tolerance = parse_number(tol) if tol else 0.0
        if tolerance is None or tolerance < 0:
            raise ClozeError(f"bad NM tolerance {tol!r}", offset)
        return Answer(weight, target, tolerance, feedback)
    text = _unescape(tok)
    if text == "":
        raise ClozeError("empty answer text", offset)
    return Answer(weight, text, None, feedback)


def _parse_group(body: str, offset: int) -> SubQuestion:
    m = _HEADER_RE.match(body)
    if m is None:
        raise ClozeError(f"malformed CLOZE group {body!r}", offset)
    kind = _KIND_ALIASES.get(m.group(2))
    if kind is None:
        raise ClozeError(f"unknown kind token {m.group(2)!r}", offset)
    points = int(m.group(1)) if m.group(1) else 1
    spec = body[m.end():-1]
    toks = _split_unescaped(spec, "~")
    if kind == "MC" and toks and toks[0] == "":
        toks = toks[1:]
    toks = [t for t in toks if t != ""]
    if not toks:
        raise ClozeError("group has no answers", offset)
    answers = tuple(_parse_answer(t, kind, offset) for t in toks)
    try:
        return SubQuestion(kind, points, answers)
    except ClozeError as e:
        raise ClozeError(str(e), offset) from None


def parse_cloze(text: str) -> tuple[list[str], list[SubQuestion]]:
    """Split text into literal segments and parsed subquestions.

    Returns (segments, subquestions) with len(segments) == len(subquestions)+1.
    Braces that do not open a `{points:KIND:` header are treated as literal
    text (LaTeX survives); headers without a closing brace are errors.
    """
    segments = [""]
    subs: list[SubQuestion] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "{" and _HEADER_RE.match(text, i):
            j = i + 1
            while j < len(text):
                if text[j] == "\\" and j + 1 < len(text):
                    j += 2
                    continue
                if text[j] == "}":
                    break
                j += 1
            else:
                raise ClozeError("unbalanced braces: group never closes", i)
            if j >= len(text):
                raise ClozeError("unbalanced braces: group never closes", i)
            subs.append(_parse_group(text[i:j + 1], i))
            segments.append("")
            i = j + 1
        else:
            segments[-1] += ch
            i += 1
    return segments, subs


# ---------------------------------------------------------------------------
# grading

@dataclass(frozen=True)
class GradeResult:
    fraction: float
    matched_weight: int | None
    non_numeric: bool = False


def _wildcard_regex(pattern: str, case_insensitive: bool) -> re.Pattern:
    parts = [re.escape(p) for p in pattern.split("*")]
    flags = re.IGNORECASE if case_insensitive else 0
    return re.compile("(?s)" + ".*".join(parts), flags)


def grade_response(sub: SubQuestion, response: str) -> GradeResult:
    """Grade one response; fraction is max matching weight / 100."""
    if sub.kind == "NM":
        value = parse_number(response.strip())
        if value is None:
            return GradeResult(0.0, None, non_numeric=True)
        best = None
        for a in sub.answers:
            if abs(value - float(a.target)) <= a.tolerance:
                if best is None or a.weight > best:
                    best = a.weight
        return GradeResult(0.0 if best is None else best / 100.0, best)
    if sub.kind == "MC":
        best = None
        for a in sub.answers:
            if response == a.target and (best is None or a.weight > best):
                best = a.weight
        return GradeResult(0.0 if best is None else best / 100.0, best)
    # SA / SAC
    resp = response.strip()
    best = None
    for a in sub.answers:
        rx = _wildcard_regex(str(a.target), case_insensitive=(sub.kind == "SA"))
        if rx.fullmatch(resp) and (best is None or a.weight > best):
            best = a.weight
    return GradeResult(0.0 if best is None else best / 100.0, best)


def grade(sub: SubQuestion, response: str) -> float:
    return grade_response(sub, response).fraction
