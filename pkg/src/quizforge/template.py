"""Quiz template documents and their instantiation.

A template is a declarative JSON document (schema `quizforge-template-v1`)
with one or more stories; each story carries an ordered variable list and
question parts. Instantiation evaluates the variables under a per-instance
substream, interpolates `{{var}}` slots, builds the CLOZE group for each
part and inserts it at the `@` mark (or appends it), producing the
five-field quiz instance (question, hint, answer, category, name).
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field

from . import cloze, expr
from .numfmt import format_number, round_half_away
from .rng import derive_stream

SCHEMA = "quizforge-template-v1"

_INTERP_RE = re.compile(r"\{\{\s*([A-Za-z_.][A-Za-z0-9_.]*)\s*\}\}")


class TemplateError(ValueError):
    """Schema violation, with the offending field path in the message."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class AnswerSpec:
    type: str  # numeric | choice | shortanswer | display
    points: int = 1
    # numeric
    targets: tuple = ()        # parsed expressions
    weights: tuple = ()
    tolerances: tuple = ()     # parsed expressions
    ndigits: object = None     # parsed expression, alternative to tolerances
    partial_weight: int = 80
    # choice
    options: tuple = ()
    correct: object = None     # parsed expression
    # shortanswer
    texts: tuple = ()
    caps_insensitive: bool = True


@dataclass(frozen=True)
class QuestionPart:
    text: str
    answer: AnswerSpec
    newline_before: bool = True


@dataclass(frozen=True)
class Story:
    weight: float
    variables: tuple  # of (name, source, parsed ast)
    parts: tuple
    hint_text: str = ""
    answer_text: str = ""


@dataclass(frozen=True)
class QuizTemplate:
    name: str
    category: str
    stories: tuple
    quizname_prefix: str = "problem -"
    count_default: int = 20
    h5_wrap: bool = True


@dataclass(frozen=True)
class QuizInstance:
    qtxt: str
    htxt: str
    atxt: str
    category: str
    quizname: str
    # correct response per CLOZE group, in document order (grading oracle)
    correct_answers: tuple = field(default=(), compare=False)


# ---------------------------------------------------------------------------
# loading

def _require(doc: dict, key: str, typ, path: str):
    if key not in doc:
        raise TemplateError(f"missing field {key!r}", path)
    v = doc[key]
    if typ is float and isinstance(v, int) and not isinstance(v, bool):
        v = float(v)
    if not isinstance(v, typ) or isinstance(v, bool) and typ is not bool:
        raise TemplateError(f"field {key!r} must be {typ.__name__}", path)
    return v


def _check_unknown(doc: dict, allowed: set, path: str):
    for k in doc:
        if k not in allowed:
            raise TemplateError(f"unknown field {k!r}", path)


def _parse_or_raise(source, path: str):
    if not isinstance(source, str):
        raise TemplateError("expression must be a string", path)
    try:
        return expr.parse_expr(source)
    except expr.ExprSyntaxError as e:
        raise TemplateError(f"expression error in {source!r}: {e}", path) from None


def _free_variables(node, bound: frozenset = frozenset()) -> set:
    """Identifiers a parsed expression reads from the environment."""
    out: set = set()
    if isinstance(node, expr.Var):
        if node.name not in bound:
            out.add(node.name)
    elif isinstance(node, expr.Unary):
        out |= _free_variables(node.operand, bound)
    elif isinstance(node, expr.Binary):
        out |= _free_variables(node.left, bound) | _free_variables(node.right, bound)
    elif isinstance(node, expr.IfElse):
        for sub in (node.cond, node.then, node.orelse):
            out |= _free_variables(sub, bound)
    elif isinstance(node, expr.Index):
        out |= _free_variables(node.obj, bound) | _free_variables(node.index, bound)
    elif isinstance(node, expr.Call):
        args = node.args
        if node.name == "integrate" and args:
            out |= _free_variables(args[0], bound | {"x"})
            args = args[1:]
        for a in args:
            out |= _free_variables(a, bound)
        for _, v in node.kwargs:
            out |= _free_variables(v, bound)
    return out


def _load_answer(doc: dict, declared: set, path: str) -> AnswerSpec:
    typ = _require(doc, "type", str, path)
    points = int(doc.get("points", 1))
    if points < 1:
        raise TemplateError("points must be >= 1", path + ".points")

    def check_refs(node, subpath):
        missing = _free_variables(node) - declared
        if missing:
            raise TemplateError(
                f"references undeclared variable {sorted(missing)[0]!r}", subpath)

    if typ == "display":
        _check_unknown(doc, {"type"}, path)
        return AnswerSpec("display")
    if typ == "numeric":
        _check_unknown(doc, {"type", "points", "targets", "weights", "tolerances",
                             "target", "ndigits", "partial_weight"}, path)
        if "ndigits" in doc:
            target = _parse_or_raise(_require(doc, "target", str, path), path + ".target")
            nd = _parse_or_raise(str(doc["ndigits"]) if not isinstance(doc["ndigits"], str)
                                 else doc["ndigits"], path + ".ndigits")
            for node, sp in ((target, path + ".target"), (nd, path + ".ndigits")):
                check_refs(node, sp)
            return AnswerSpec("numeric", points, targets=(target,), ndigits=nd,
                              partial_weight=int(doc.get("partial_weight", 80)))
        targets = _require(doc, "targets", list, path)
        weights = _require(doc, "weights", list, path)
        tolerances = _require(doc, "tolerances", list, path)
        if not (len(targets) == len(weights) == len(tolerances)) or not targets:
            raise TemplateError("targets, weights, tolerances must be nonempty "
                                "lists of equal length", path)
        if not any(w == 100 for w in weights):
            raise TemplateError("one weight must be 100", path + ".weights")
        t_nodes = tuple(_parse_or_raise(str(t) if not isinstance(t, str) else t,
                                        f"{path}.targets[{i}]")
                        for i, t in enumerate(targets))
        e_nodes = tuple(_parse_or_raise(str(t) if not isinstance(t, str) else t,
                                        f"{path}.tolerances[{i}]")
                        for i, t in enumerate(tolerances))
        for i, node in enumerate(t_nodes):
            check_refs(node, f"{path}.targets[{i}]")
        for i, node in enumerate(e_nodes):
            check_refs(node, f"{path}.tolerances[{i}]")
        for i, w in enumerate(weights):
            if not isinstance(w, int) or not 0 <= w <= 100:
                raise TemplateError("weights are integers in 0..100",
                                    f"{path}.weights[{i}]")
        return AnswerSpec("numeric", points, targets=t_nodes,
                          weights=tuple(weights), tolerances=e_nodes)
    if typ == "choice":
        _check_unknown(doc, {"type", "points", "options", "builtin", "correct"}, path)
        if "builtin" in doc:
            options = tuple(cloze.builtin_mc_options(int(doc["builtin"])))
        else:
            opts = _require(doc, "options", list, path)
            if not opts or not all(isinstance(o, str) and o for o in opts):
                raise TemplateError("options must be nonempty strings", path + ".options")
            options = tuple(opts)
        correct = _parse_or_raise(_require(doc, "correct", str, path), path + ".correct")
        check_refs(correct, path + ".correct")
        return AnswerSpec("choice", points, options=options, correct=correct)
    if typ == "shortanswer":
        _check_unknown(doc, {"type", "points", "texts", "weights", "caps_insensitive"},
                       path)
        texts = _require(doc, "texts", list, path)
        if not texts or not all(isinstance(t, str) and t for t in texts):
            raise TemplateError("texts must be nonempty strings", path + ".texts")
        weights = doc.get("weights", [100] * len(texts))
        if len(weights) != len(texts):
            raise TemplateError("weights must match texts", path + ".weights")
        return AnswerSpec("shortanswer", points, texts=tuple(texts),
                          weights=tuple(int(w) for w in weights),
                          caps_insensitive=bool(doc.get("caps_insensitive", True)))
    raise TemplateError(f"unknown answer type {typ!r}", path + ".type")


def _load_story(doc: dict, idx: int) -> Story:
    path = f"stories[{idx}]"
    _check_unknown(doc, {"weight", "variables", "parts", "hint", "answer_text"}, path)
    weight = float(doc.get("weight", 1))
    if weight <= 0:
        raise TemplateError("weight must be positive", path + ".weight")
    declared: set = set()
    variables = []
    for i, v in enumerate(doc.get("variables", [])):
        vpath = f"{path}.variables[{i}]"
        if not isinstance(v, dict):
            raise TemplateError("variable entries are objects", vpath)
        _check_unknown(v, {"name", "expr"}, vpath)
        name = _require(v, "name", str, vpath)
        if not re.fullmatch(r"[A-Za-z_.][A-Za-z0-9_.]*", name):
            raise TemplateError(f"bad variable name {name!r}", vpath)
        if name in declared:
            raise TemplateError(f"duplicate variable {name!r}", vpath)
        source = _require(v, "expr", str, vpath)
        node = _parse_or_raise(source, vpath + ".expr")
        missing = _free_variables(node) - declared
        if missing:
            raise TemplateError(
                f"variable {name!r} references {sorted(missing)[0]!r} "
                f"before its definition", vpath + ".expr")
        declared.add(name)
        variables.append((name, source, node))
    parts_doc = doc.get("parts", [])
    if not parts_doc:
        raise TemplateError("story needs at least one part", path + ".parts")
    parts = []
    for i, p in enumerate(parts_doc):
        ppath = f"{path}.parts[{i}]"
        if not isinstance(p, dict):
            raise TemplateError("parts are objects", ppath)
        _check_unknown(p, {"text", "answer", "newline"}, ppath)
        text = _require(p, "text", str, ppath)
        if text.count("@") > 1:
            raise TemplateError("at most one @ insertion mark per part", ppath + ".text")
        answer_doc = p.get("answer", {"type": "display"})
        if not isinstance(answer_doc, dict):
            raise TemplateError("answer must be an object", ppath + ".answer")
        answer = _load_answer(dict(answer_doc), declared, ppath + ".answer")
        parts.append(QuestionPart(text, answer, bool(p.get("newline", True))))
    return Story(weight, tuple(variables), tuple(parts),
                 str(doc.get("hint", "")), str(doc.get("answer_text", "")))


def load_template(document) -> QuizTemplate:
    """Validate a template document (dict or JSON text) into a QuizTemplate."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise TemplateError(f"not valid JSON: {e}") from None
    if not isinstance(document, dict):
        raise TemplateError("template document must be a JSON object")
    _check_unknown(document, {"schema", "name", "category", "quizname_prefix",
                              "count", "h5_wrap", "stories"}, "")
    schema = document.get("schema", SCHEMA)
    if schema != SCHEMA:
        raise TemplateError(f"unsupported schema {schema!r}", "schema")
    name = _require(document, "name", str, "")
    category = _require(document, "category", str, "")
    if not category.strip():
        raise TemplateError("category must be nonempty", "category")
    stories_doc = _require(document, "stories", list, "")
    if not stories_doc:
        raise TemplateError("need at least one story", "stories")
    stories = tuple(_load_story(s, i) for i, s in enumerate(stories_doc))
    count = int(document.get("count", 20))
    if count < 1:
        raise TemplateError("count must be >= 1", "count")
    return QuizTemplate(name, category, stories,
                        str(document.get("quizname_prefix", "problem -")),
                        count, bool(document.get("h5_wrap", True)))


def load_template_file(path) -> QuizTemplate:
    with open(path, "r", encoding="utf-8") as fh:
        return load_template(fh.read())


# ---------------------------------------------------------------------------
# instantiation

def _interpolate(text: str, env: dict) -> str:
    def repl(m):
        name = m.group(1)
        if name not in env:
            raise GenerationError(f"interpolation references unknown variable {name!r}")
        return expr.format_value(env[name])
    return _INTERP_RE.sub(repl, text)


def _eval_scalar(node, env, rng) -> float:
    return expr.as_number(expr.evaluate(node, env, rng))


def _build_cloze(spec: AnswerSpec, env, rng) -> tuple[str, str]:
    """Returns (cloze string, correct response text)."""
    if spec.type == "numeric":
        if spec.ndigits is not None:
            target = _eval_scalar(spec.targets[0], env, rng)
            nd = int(_eval_scalar(spec.ndigits, env, rng))
            s = cloze.encode_nm_digits(target, nd, spec.points, spec.partial_weight)
            return s, format_number(round_half_away(target, nd))
        targets = [_eval_scalar(t, env, rng) for t in spec.targets]
        tols = [_eval_scalar(t, env, rng) for t in spec.tolerances]
        s = cloze.encode_nm(targets, list(spec.weights), tols, spec.points)
        best = targets[list(spec.weights).index(100)]
        return s, format_number(best)
    if spec.type == "choice":
        sel = expr.evaluate(spec.correct, env, rng)
        if isinstance(sel, str):
            if sel not in spec.options:
                raise GenerationError(f"correct option {sel!r} not among options")
            correct = sel
        else:
            i = int(expr.as_number(sel))
            if not 1 <= i <= len(spec.options):
                raise GenerationError(f"correct option index {i} out of range")
            correct = spec.options[i - 1]
        weights = [100 if o == correct else 0 for o in spec.options]
        s, correct_text = cloze.encode_mc(list(spec.options), weights, spec.points)
        return s, correct_text
    if spec.type == "shortanswer":
        texts = [_interpolate(t, env) for t in spec.texts]
        s = cloze.encode_sa(texts, list(spec.weights), spec.caps_insensitive,
                            spec.points)
        best = texts[list(spec.weights).index(100)]
        return s, best
    raise GenerationError(f"cannot build answer of type {spec.type!r}")


def _wrap(text: str, h5: bool) -> str:
    if not text:
        return ""
    return f"<h5>{text}</h5>" if h5 else text


def instantiate(t: QuizTemplate, seed: int, index: int,
                story_override: int | None = None) -> QuizInstance:
    """Render one quiz instance; pure in (template, seed, index, override)."""
    if index < 0:
        raise GenerationError("index must be >= 0")
    rng = derive_stream(seed, index)
    if story_override is not None:
        if not 1 <= story_override <= len(t.stories):
            raise GenerationError(
                f"story {story_override} does not exist (1..{len(t.stories)})")
        story_idx = story_override - 1
    elif len(t.stories) > 1:
        story_idx = rng.choice_weighted([s.weight for s in t.stories])
    else:
        story_idx = 0
    story = t.stories[story_idx]

    env: dict = {}
    for name, source, node in story.variables:
        try:
            env[name] = expr.evaluate(node, env, rng)
        except expr.ExprError as e:
            raise GenerationError(f"evaluating variable {name!r}: {e}") from None

    rendered = []
    correct: list[str] = []
    for part in story.parts:
        text = _interpolate(part.text, env)
        if part.answer.type != "display":
            try:
                group, right = _build_cloze(part.answer, env, rng)
            except cloze.ClozeError as e:
                raise GenerationError(f"CLOZE build error: {e}") from None
            at = text.find("@")
            text = text[:at] + group + text[at + 1:] if at >= 0 else text + group
            correct.append(right)
        prefix = "<p>" if part.newline_before else ""
        rendered.append(prefix + text)
    qtxt = _wrap("".join(rendered), t.h5_wrap)
    try:
        cloze.parse_cloze(qtxt)
    except cloze.ClozeError as e:
        raise GenerationError(f"generated question text has invalid CLOZE: {e}") from None

    category = t.category
    if len(t.stories) > 1:
        category = f"{category} : Story : {story_idx + 1}"
    return QuizInstance(
        qtxt=qtxt,
        htxt=_wrap(_interpolate(story.hint_text, env), t.h5_wrap),
        atxt=_wrap(_interpolate(story.answer_text, env), t.h5_wrap),
        category=category,
        quizname=f"{t.quizname_prefix} {index + 1}",
        correct_answers=tuple(correct),
    )


def instantiate_batch(t: QuizTemplate, seed: int, n: int,
                      story_override: int | None = None) -> list[QuizInstance]:
    """Instances for indices 0..n-1; duplicate question texts warn only."""
    if n < 1:
        raise GenerationError("n must be >= 1")
    out = []
    for i in range(n):
        try:
            out.append(instantiate(t, seed, i, story_override))
        except GenerationError as e:
            raise GenerationError(f"instance {i}: {e}") from None
    seen: dict = {}
    for i, inst in enumerate(out):
        if inst.qtxt in seen:
            warnings.warn(f"instances {seen[inst.qtxt]} and {i} have identical "
                          f"question text (seed {seed})")
        seen.setdefault(inst.qtxt, i)
    return out
