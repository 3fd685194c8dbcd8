"""The randomization expression language used inside quiz templates.

A small R-lookalike: arithmetic, comparisons, `a:b` ranges, `c(...)`
vectors, function calls with named arguments, 1-based indexing and an
`if (cond) a else b` expression. No assignment, no loops, no user
functions; templates supply variables as an ordered list, so evaluation
is total and sandboxed.

Built-in functions mirror the core behavior of their R namesakes
(sample, runif, rnorm, round, mean, quantile, integrate, ...) but stream
compatibility with R's RNG is not attempted: all draws come from the
deterministic substreams in quizforge.rng.
"""

from __future__ import annotations

import math
import re
import statistics as _pystats
from dataclasses import dataclass, field

from scipy import special as _sp

from . import stattests
from .numfmt import format_number, round_half_away
from .quadrature import IntegrationError, integrate as _simpson_integrate
from .rng import RngStream, derive_stream  # noqa: F401  (re-exported)

_NORMAL = _pystats.NormalDist()


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class ExprEvalError(ExprError):
    pass


# ---------------------------------------------------------------------------
# values

@dataclass(frozen=True)
class NamedVector:
    """Numeric vector with element labels (the result of table(x))."""
    values: tuple
    names: tuple

    def __len__(self):
        return len(self.values)


StatResult = stattests.StatResult


def format_value(v) -> str:
    """Canonical text form used by paste0 and template interpolation."""
    if isinstance(v, bool):
        return "TRUE" if v else "FALSE"
    if isinstance(v, (int, float)):
        return format_number(float(v))
    if isinstance(v, str):
        return v
    if isinstance(v, NamedVector):
        return ", ".join(f"{n}: {format_value(x)}" for n, x in zip(v.names, v.values))
    if isinstance(v, list):
        return ", ".join(format_value(x) for x in v)
    if isinstance(v, StatResult):
        return ", ".join(f"{k} = {format_value(x)}" for k, x in v.fields().items()
                         if not isinstance(x, str))
    raise ExprEvalError(f"cannot format value of type {type(v).__name__}")


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Bool:
    value: bool


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    kwargs: tuple  # of (name, node)


@dataclass(frozen=True)
class Index:
    obj: object
    index: object


@dataclass(frozen=True)
class IfElse:
    cond: object
    then: object
    orelse: object


# ---------------------------------------------------------------------------
# lexer / parser

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?)
  | (?P<str>"(?:[^"\\]|\\.)*"|'(?:[^'\\]|\\.)*')
  | (?P<ident>[A-Za-z_.][A-Za-z0-9_.]*)
  | (?P<op><=|>=|==|!=|&&|\|\||[-+*/^:<>!&|=,()\[\]])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(source: str) -> list[_Tok]:
    toks = []
    line, col = 1, 1
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", line, col)
        text = m.group(0)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, source: str):
        self.toks = _tokenize(source)
        self.i = 0

    @property
    def cur(self) -> _Tok:
        return self.toks[self.i]

    def _err(self, msg: str):
        t = self.cur
        raise ExprSyntaxError(msg, t.line, t.col)

    def _eat(self, text: str | None = None, kind: str | None = None) -> _Tok:
        t = self.cur
        if text is not None and t.text != text:
            self._err(f"expected {text!r}, found {t.text!r}")
        if kind is not None and t.kind != kind:
            self._err(f"expected {kind}, found {t.text!r}")
        self.i += 1
        return t

    def parse(self):
        node = self.expr()
        if self.cur.kind != "eof":
            self._err(f"unexpected trailing input {self.cur.text!r}")
        return node

    def expr(self):
        return self.or_()

    def _binop(self, sub, ops):
        node = sub()
        while self.cur.text in ops and self.cur.kind == "op":
            op = self._eat().text
            node = Binary(op, node, sub())
        return node

    def or_(self):
        return self._binop(self.and_, ("|", "||"))

    def and_(self):
        return self._binop(self.not_, ("&", "&&"))

    def not_(self):
        if self.cur.text == "!":
            self._eat()
            return Unary("!", self.not_())
        return self.cmp()

    def cmp(self):
        return self._binop(self.add, ("==", "!=", "<", "<=", ">", ">="))

    def add(self):
        return self._binop(self.mul, ("+", "-"))

    def mul(self):
        return self._binop(self.range_, ("*", "/"))

    def range_(self):
        return self._binop(self.unary, (":",))

    def unary(self):
        if self.cur.text in ("-", "+") and self.cur.kind == "op":
            op = self._eat().text
            return Unary(op, self.unary())
        return self.power()

    def power(self):
        base = self.postfix()
        if self.cur.text == "^":
            self._eat()
            return Binary("^", base, self.unary())
        return base

    def postfix(self):
        node = self.primary()
        while self.cur.text == "[":
            self._eat("[")
            idx = self.expr()
            self._eat("]")
            node = Index(node, idx)
        return node

    def primary(self):
        t = self.cur
        if t.kind == "num":
            self._eat()
            return Num(float(t.text))
        if t.kind == "str":
            self._eat()
            body = t.text[1:-1]
            return Str(re.sub(r"\\(.)", r"\1", body))
        if t.kind == "ident":
            if t.text == "TRUE":
                self._eat()
                return Bool(True)
            if t.text == "FALSE":
                self._eat()
                return Bool(False)
            if t.text == "if":
                return self.if_else()
            self._eat()
            if self.cur.text == "(":
                return self.call(t.text)
            return Var(t.text)
        if t.text == "(":
            self._eat("(")
            node = self.expr()
            self._eat(")")
            return node
        self._err(f"unexpected token {t.text!r}")

    def if_else(self):
        self._eat(text="if")
        self._eat("(")
        cond = self.expr()
        self._eat(")")
        then = self.expr()
        self._eat(text="else")
        orelse = self.expr()
        return IfElse(cond, then, orelse)

    def call(self, name: str) -> Call:
        self._eat("(")
        args = []
        kwargs = []
        if self.cur.text != ")":
            while True:
                if (self.cur.kind == "ident"
                        and self.toks[self.i + 1].text == "="
                        and self.toks[self.i + 1].kind == "op"):
                    key = self._eat().text
                    self._eat("=")
                    kwargs.append((key, self.expr()))
                else:
                    if kwargs:
                        self._err("positional argument after named argument")
                    args.append(self.expr())
                if self.cur.text != ",":
                    break
                self._eat(",")
        self._eat(")")
        return Call(name, tuple(args), tuple(kwargs))


def parse_expr(source: str):
    """Parse one expression; raises ExprSyntaxError with line/column."""
    return _Parser(source).parse()


# ---------------------------------------------------------------------------
# evaluation helpers

def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def as_number(v) -> float:
    if isinstance(v, bool):
        return 1.0 if v else 0.0
    if _is_num(v):
        return float(v)
    if isinstance(v, list) and len(v) == 1:
        return as_number(v[0])
    raise ExprEvalError(f"expected a number, got {v!r}")


def as_int(v) -> int:
    x = as_number(v)
    if x != int(x):
        raise ExprEvalError(f"expected an integer, got {x}")
    return int(x)


def as_vector(v) -> list:
    if isinstance(v, list):
        return v
    if isinstance(v, NamedVector):
        return list(v.values)
    if _is_num(v) or isinstance(v, (bool, str)):
        return [v]
    raise ExprEvalError(f"expected a vector, got {v!r}")


def as_num_vector(v) -> list[float]:
    vec = as_vector(v)
    out = []
    for x in vec:
        if not _is_num(x) and not isinstance(x, bool):
            raise ExprEvalError(f"expected numeric vector, found {x!r}")
        out.append(float(x))
    if not out:
        raise ExprEvalError("empty numeric vector")
    return out


def _check_finite(x: float) -> float:
    if x != x or math.isinf(x):
        raise ExprEvalError("expression produced a non-finite number")
    return x


def _elementwise(op, a, b):
    av, bv = a, b
    a_vec = isinstance(a, (list, NamedVector))
    b_vec = isinstance(b, (list, NamedVector))
    if not a_vec and not b_vec:
        return op(a, b)
    av = as_vector(a)
    bv = as_vector(b)
    if len(av) == 1:
        av = av * len(bv)
    if len(bv) == 1:
        bv = bv * len(av)
    if len(av) != len(bv):
        raise ExprEvalError(f"vector length mismatch: {len(av)} vs {len(bv)}")
    return [op(x, y) for x, y in zip(av, bv)]


_ARITH = {
    "+": lambda x, y: x + y,
    "-": lambda x, y: x - y,
    "*": lambda x, y: x * y,
    "/": lambda x, y: x / y,
    "^": lambda x, y: x ** y,
}

_CMP = {
    "==": lambda x, y: x == y,
    "!=": lambda x, y: x != y,
    "<": lambda x, y: x < y,
    "<=": lambda x, y: x <= y,
    ">": lambda x, y: x > y,
    ">=": lambda x, y: x >= y,
}


@dataclass
class EvalContext:
    env: dict
    rng: RngStream


# ---------------------------------------------------------------------------
# built-in functions

def _kw(kwargs: dict, name: str, default):
    return kwargs.pop(name, default)


def _f_sample(ctx, args, kwargs):
    x = args[0]
    if _is_num(x):
        n = as_int(x)
        pool = [float(i) for i in range(1, n + 1)]
    else:
        pool = list(as_vector(x))
    size = _kw(kwargs, "size", args[1] if len(args) > 1 else None)
    replace = _kw(kwargs, "replace", args[2] if len(args) > 2 else False)
    prob = _kw(kwargs, "prob", args[3] if len(args) > 3 else None)
    size = len(pool) if size is None else as_int(size)
    if size < 0:
        raise ExprEvalError("sample size must be >= 0")
    replace = bool(replace) if isinstance(replace, bool) else as_number(replace) != 0
    if prob is not None:
        weights = as_num_vector(prob)
        if len(weights) != len(pool):
            raise ExprEvalError("prob must match the number of items")
        if replace:
            out = [pool[ctx.rng.choice_weighted(weights)] for _ in range(size)]
        else:
            if size > len(pool):
                raise ExprEvalError("cannot sample more items than available")
            pool = list(pool)
            weights = list(weights)
            out = []
            for _ in range(size):
                i = ctx.rng.choice_weighted(weights)
                out.append(pool.pop(i))
                weights.pop(i)
    elif replace:
        out = [pool[ctx.rng.randint(len(pool))] for _ in range(size)]
    else:
        if size > len(pool):
            raise ExprEvalError("cannot sample more items than available")
        out = ctx.rng.shuffle(pool)[:size]
    return out[0] if size == 1 else out


def _n_draws(args, kwargs, name):
    if not args:
        raise ExprEvalError(f"{name} needs the number of draws")
    n = as_int(args[0])
    if n < 1:
        raise ExprEvalError(f"{name} needs n >= 1")
    return n


def _f_runif(ctx, args, kwargs):
    n = _n_draws(args, kwargs, "runif")
    a = as_number(args[1]) if len(args) > 1 else as_number(_kw(kwargs, "min", 0.0))
    b = as_number(args[2]) if len(args) > 2 else as_number(_kw(kwargs, "max", 1.0))
    out = [ctx.rng.uniform(a, b) for _ in range(n)]
    return out[0] if n == 1 else out


def _f_rnorm(ctx, args, kwargs):
    n = _n_draws(args, kwargs, "rnorm")
    mean = as_number(args[1]) if len(args) > 1 else as_number(_kw(kwargs, "mean", 0.0))
    sd = as_number(args[2]) if len(args) > 2 else as_number(_kw(kwargs, "sd", 1.0))
    if sd < 0:
        raise ExprEvalError("rnorm needs sd >= 0")
    out = [ctx.rng.normal(mean, sd) for _ in range(n)]
    return out[0] if n == 1 else out


def _f_rbinom(ctx, args, kwargs):
    n = _n_draws(args, kwargs, "rbinom")
    size = as_int(args[1]) if len(args) > 1 else as_int(_kw(kwargs, "size", None))
    p = as_number(args[2]) if len(args) > 2 else as_number(_kw(kwargs, "prob", None))
    if size < 0:
        raise ExprEvalError("rbinom needs size >= 0")
    if not 0.0 <= p <= 1.0:
        raise ExprEvalError("rbinom needs prob in [0, 1]")
    out = [float(ctx.rng.binomial(size, p)) for _ in range(n)]
    return out[0] if n == 1 else out


def _f_rchisq(ctx, args, kwargs):
    n = _n_draws(args, kwargs, "rchisq")
    df = as_number(args[1]) if len(args) > 1 else as_number(_kw(kwargs, "df", None))
    if df <= 0:
        raise ExprEvalError("rchisq needs df > 0")
    out = [2.0 * float(_sp.gammaincinv(df / 2.0, ctx.rng.uniform01()))
           for _ in range(n)]
    return out[0] if n == 1 else out


def _f_rbeta(ctx, args, kwargs):
    n = _n_draws(args, kwargs, "rbeta")
    a = as_number(args[1]) if len(args) > 1 else as_number(_kw(kwargs, "shape1", None))
    b = as_number(args[2]) if len(args) > 2 else as_number(_kw(kwargs, "shape2", None))
    if a <= 0 or b <= 0:
        raise ExprEvalError("rbeta needs positive shape parameters")
    out = [float(_sp.betaincinv(a, b, ctx.rng.uniform01())) for _ in range(n)]
    return out[0] if n == 1 else out


def _f_round(ctx, args, kwargs):
    digits = as_int(args[1]) if len(args) > 1 else as_int(_kw(kwargs, "digits", 0.0))
    x = args[0]
    if isinstance(x, (list, NamedVector)):
        return [round_half_away(v, digits) for v in as_num_vector(x)]
    return round_half_away(as_number(x), digits)


def _vec_stat(fn):
    def wrapped(ctx, args, kwargs):
        return fn(as_num_vector(args[0]))
    return wrapped


def _sd(x: list[float]) -> float:
    if len(x) < 2:
        raise ExprEvalError("sd needs at least 2 values")
    m = sum(x) / len(x)
    return math.sqrt(sum((v - m) ** 2 for v in x) / (len(x) - 1))


def _median(x: list[float]) -> float:
    s = sorted(x)
    n = len(s)
    mid = n // 2
    return s[mid] if n % 2 else (s[mid - 1] + s[mid]) / 2


def quantile(x: list[float], p: float) -> float:
    """R's default (type 7) linear-interpolation quantile."""
    if not 0.0 <= p <= 1.0:
        raise ExprEvalError("quantile needs p in [0, 1]")
    s = sorted(x)
    h = (len(s) - 1) * p
    lo = math.floor(h)
    hi = min(lo + 1, len(s) - 1)
    return s[lo] + (h - lo) * (s[hi] - s[lo])


def fivenum(x: list[float]) -> list[float]:
    """Tukey's five-number summary: min, lower hinge, median, upper hinge, max."""
    s = sorted(x)
    n = len(s)
    n4 = math.floor((n + 3) / 2) / 2
    idx = [1.0, n4, (n + 1) / 2, n + 1 - n4, float(n)]
    return [0.5 * (s[math.floor(i) - 1] + s[math.ceil(i) - 1]) for i in idx]


def _f_quantile(ctx, args, kwargs):
    x = as_num_vector(args[0])
    p = args[1] if len(args) > 1 else _kw(kwargs, "probs", None)
    if p is None:
        raise ExprEvalError("quantile needs probabilities")
    if isinstance(p, (list, NamedVector)):
        return [quantile(x, pi) for pi in as_num_vector(p)]
    return quantile(x, as_number(p))


def _f_table(ctx, args, kwargs):
    vec = as_vector(args[0])
    if not vec:
        raise ExprEvalError("table needs a nonempty vector")
    counts: dict = {}
    for v in vec:
        key = format_value(v) if not isinstance(v, str) else v
        counts[key] = counts.get(key, 0) + 1
    names = sorted(counts)
    return NamedVector(tuple(float(counts[k]) for k in names), tuple(names))


def _f_seq(ctx, args, kwargs):
    start = as_number(args[0])
    stop = as_number(args[1]) if len(args) > 1 else as_number(_kw(kwargs, "to", None))
    by = as_number(args[2]) if len(args) > 2 else as_number(_kw(kwargs, "by", 1.0))
    if by == 0:
        raise ExprEvalError("seq needs by != 0")
    out = []
    k = 0
    while True:
        v = start + k * by
        if (by > 0 and v > stop + 1e-12) or (by < 0 and v < stop - 1e-12):
            break
        out.append(v)
        k += 1
    if not out:
        raise ExprEvalError("empty sequence")
    return out


def _f_rep(ctx, args, kwargs):
    times = as_int(args[1]) if len(args) > 1 else as_int(_kw(kwargs, "times", None))
    if times < 1:
        raise ExprEvalError("rep needs times >= 1")
    return as_vector(args[0]) * times


def _f_paste0(ctx, args, kwargs):
    sep = str(_kw(kwargs, "sep", ""))
    return sep.join(format_value(a) for a in args)


def _f_format(ctx, args, kwargs):
    nsmall = as_int(_kw(kwargs, "nsmall", args[1] if len(args) > 1 else 0.0))
    x = args[0]
    if isinstance(x, str):
        return x
    return f"{as_number(x):.{nsmall}f}" if nsmall > 0 else format_value(x)


def _f_cor(ctx, args, kwargs):
    x = as_num_vector(args[0])
    y = as_num_vector(args[1])
    if len(x) != len(y) or len(x) < 2:
        raise ExprEvalError("cor needs two equal-length vectors (n >= 2)")
    mx, my = sum(x) / len(x), sum(y) / len(y)
    sxx = sum((v - mx) ** 2 for v in x)
    syy = sum((v - my) ** 2 for v in y)
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    if sxx == 0 or syy == 0:
        raise ExprEvalError("cor undefined for constant vectors")
    return sxy / math.sqrt(sxx * syy)


def _f_qnorm(ctx, args, kwargs):
    p = as_number(args[0])
    mean = as_number(args[1]) if len(args) > 1 else as_number(_kw(kwargs, "mean", 0.0))
    sd = as_number(args[2]) if len(args) > 2 else as_number(_kw(kwargs, "sd", 1.0))
    if not 0.0 < p < 1.0:
        raise ExprEvalError("qnorm needs p in (0, 1)")
    return mean + sd * _NORMAL.inv_cdf(p)


def _f_qt(ctx, args, kwargs):
    p = as_number(args[0])
    df = as_number(args[1])
    if not 0.0 < p < 1.0:
        raise ExprEvalError("qt needs p in (0, 1)")
    return float(_sp.stdtrit(df, p))


def _f_pnorm(ctx, args, kwargs):
    x = as_number(args[0])
    mean = as_number(args[1]) if len(args) > 1 else as_number(_kw(kwargs, "mean", 0.0))
    sd = as_number(args[2]) if len(args) > 2 else as_number(_kw(kwargs, "sd", 1.0))
    return _NORMAL.cdf((x - mean) / sd)


def _f_pt(ctx, args, kwargs):
    return float(_sp.stdtr(as_number(args[1]), as_number(args[0])))


def _f_ifelse(ctx, args, kwargs):
    cond = args[0]
    if isinstance(cond, (list, NamedVector)):
        yes = as_vector(args[1]) if isinstance(args[1], (list, NamedVector)) \
            else [args[1]] * len(cond)
        no = as_vector(args[2]) if isinstance(args[2], (list, NamedVector)) \
            else [args[2]] * len(cond)
        cv = as_vector(cond)
        if not len(cv) == len(yes) == len(no):
            raise ExprEvalError("ifelse arguments have mismatched lengths")
        return [y if bool(c) else n for c, y, n in zip(cv, yes, no)]
    return args[1] if bool(cond) else args[2]


def _f_t_test_one(ctx, args, kwargs):
    mu = as_number(args[1]) if len(args) > 1 else as_number(_kw(kwargs, "mu", 0.0))
    conf = as_number(_kw(kwargs, "conf_level", 0.95))
    return stattests.t_one_sample(as_num_vector(args[0]), mu, conf)


def _f_t_test_two(ctx, args, kwargs):
    conf = as_number(_kw(kwargs, "conf_level", 0.95))
    return stattests.t_two_sample(as_num_vector(args[0]), as_num_vector(args[1]), conf)


def _f_binom_test(ctx, args, kwargs):
    p = as_number(args[2]) if len(args) > 2 else as_number(_kw(kwargs, "p", 0.5))
    return stattests.binom_exact(as_int(args[0]), as_int(args[1]), p)


def _f_regression(ctx, args, kwargs):
    return stattests.simple_regression(as_num_vector(args[0]), as_num_vector(args[1]))


def _f_stat_block(ctx, args, kwargs):
    from . import htmlgen
    if not isinstance(args[0], StatResult):
        raise ExprEvalError("stat_block needs a test result")
    return htmlgen.render_stat_block(args[0])


def _f_moodle_table(ctx, args, kwargs):
    from . import htmlgen
    ncol = as_int(_kw(kwargs, "ncol", args[1] if len(args) > 1 else 10.0))
    return htmlgen.render_vector_table(as_vector(args[0]), ncol)


def _f_html_table(ctx, args, kwargs):
    from . import htmlgen
    if len(args) % 2 != 0 or not args:
        raise ExprEvalError("html_table needs name, column pairs")
    cols = []
    for i in range(0, len(args), 2):
        name = args[i]
        if not isinstance(name, str):
            raise ExprEvalError("html_table column names must be text")
        cols.append((name, as_vector(args[i + 1])))
    return htmlgen.render_data_table(htmlgen.DataTable(cols))


def _f_histogram64(ctx, args, kwargs):
    from . import htmlgen
    binwidth = as_number(args[1]) if len(args) > 1 else as_number(_kw(kwargs, "binwidth", None))
    png = htmlgen.render_chart("histogram", {"x": as_num_vector(args[0])},
                               {"binwidth": binwidth})
    return htmlgen.embed_png(png)


def _f_scatter64(ctx, args, kwargs):
    from . import htmlgen
    png = htmlgen.render_chart("scatter", {"x": as_num_vector(args[0]),
                                           "y": as_num_vector(args[1])}, {})
    return htmlgen.embed_png(png)


_BUILTINS = {
    "c": lambda ctx, args, kwargs: [v for a in args for v in as_vector(a)],
    "sample": _f_sample,
    "runif": _f_runif,
    "rnorm": _f_rnorm,
    "rbinom": _f_rbinom,
    "rchisq": _f_rchisq,
    "rbeta": _f_rbeta,
    "round": _f_round,
    "sort": lambda ctx, args, kwargs: sorted(
        as_num_vector(args[0]), reverse=bool(kwargs.pop("decreasing", False))),
    "mean": _vec_stat(lambda x: sum(x) / len(x)),
    "median": _vec_stat(_median),
    "sd": _vec_stat(_sd),
    "var": _vec_stat(lambda x: _sd(x) ** 2),
    "quantile": _f_quantile,
    "fivenum": _vec_stat(fivenum),
    "sum": _vec_stat(sum),
    "length": lambda ctx, args, kwargs: float(len(as_vector(args[0]))),
    "min": _vec_stat(min),
    "max": _vec_stat(max),
    "abs": lambda ctx, args, kwargs: _elementwise(
        lambda x, y: abs(as_number(x)), args[0], 0.0),
    "sqrt": lambda ctx, args, kwargs: _elementwise(
        lambda x, y: math.sqrt(as_number(x)), args[0], 0.0),
    "exp": lambda ctx, args, kwargs: _elementwise(
        lambda x, y: math.exp(as_number(x)), args[0], 0.0),
    "log": lambda ctx, args, kwargs: _elementwise(
        lambda x, y: math.log(as_number(x)), args[0], 0.0),
    "floor": lambda ctx, args, kwargs: _elementwise(
        lambda x, y: float(math.floor(as_number(x))), args[0], 0.0),
    "ceiling": lambda ctx, args, kwargs: _elementwise(
        lambda x, y: float(math.ceil(as_number(x))), args[0], 0.0),
    "table": _f_table,
    "seq": _f_seq,
    "rep": _f_rep,
    "paste0": _f_paste0,
    "paste": lambda ctx, args, kwargs: str(kwargs.pop("sep", " ")).join(
        format_value(a) for a in args),
    "format": _f_format,
    "cor": _f_cor,
    "qnorm": _f_qnorm,
    "qt": _f_qt,
    "pnorm": _f_pnorm,
    "pt": _f_pt,
    "ifelse": _f_ifelse,
    "t_test_one": _f_t_test_one,
    "t_test_two": _f_t_test_two,
    "binom_test": _f_binom_test,
    "regression": _f_regression,
    "stat_block": _f_stat_block,
    "moodle_table": _f_moodle_table,
    "html_table": _f_html_table,
    "histogram64": _f_histogram64,
    "scatter64": _f_scatter64,
}


# ---------------------------------------------------------------------------
# evaluator

def evaluate(node, env: dict, rng: RngStream):
    """Evaluate an AST against an environment and a substream."""
    ctx = EvalContext(env, rng)
    return _eval(node, ctx)


def eval_source(source: str, env: dict, rng: RngStream):
    return evaluate(parse_expr(source), env, rng)


def _eval(node, ctx: EvalContext):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Str):
        return node.value
    if isinstance(node, Bool):
        return node.value
    if isinstance(node, Var):
        if node.name not in ctx.env:
            raise ExprEvalError(f"unknown variable {node.name!r}")
        return ctx.env[node.name]
    if isinstance(node, Unary):
        v = _eval(node.operand, ctx)
        if node.op == "!":
            return not bool(v)
        if node.op == "-":
            return _elementwise(lambda x, y: -as_number(x), v, 0.0)
        return _elementwise(lambda x, y: +as_number(x), v, 0.0)
    if isinstance(node, Binary):
        return _eval_binary(node, ctx)
    if isinstance(node, IfElse):
        cond = _eval(node.cond, ctx)
        if not isinstance(cond, bool):
            raise ExprEvalError("if condition must be boolean")
        return _eval(node.then if cond else node.orelse, ctx)
    if isinstance(node, Index):
        return _eval_index(node, ctx)
    if isinstance(node, Call):
        return _eval_call(node, ctx)
    raise ExprEvalError(f"cannot evaluate node {node!r}")


def _eval_binary(node: Binary, ctx: EvalContext):
    op = node.op
    if op in ("&", "&&"):
        return bool(_eval(node.left, ctx)) and bool(_eval(node.right, ctx))
    if op in ("|", "||"):
        return bool(_eval(node.left, ctx)) or bool(_eval(node.right, ctx))
    left = _eval(node.left, ctx)
    right = _eval(node.right, ctx)
    if op == ":":
        a = as_int(left)
        b = as_int(right)
        step = 1 if b >= a else -1
        return [float(v) for v in range(a, b + step, step)]
    if op in _ARITH:
        if op == "+" and isinstance(left, str) and isinstance(right, str):
            return left + right
        fn = _ARITH[op]

        def apply(x, y):
            xv, yv = as_number(x), as_number(y)
            if op == "/" and yv == 0:
                raise ExprEvalError("division by zero")
            return _check_finite(float(fn(xv, yv)))
        return _elementwise(apply, left, right)
    if op in _CMP:
        fn = _CMP[op]

        def apply_cmp(x, y):
            if isinstance(x, str) or isinstance(y, str):
                if op not in ("==", "!="):
                    raise ExprEvalError(f"cannot order text values with {op}")
                return fn(x, y)
            return fn(as_number(x), as_number(y))
        return _elementwise(apply_cmp, left, right)
    raise ExprEvalError(f"unknown operator {op!r}")


def _eval_index(node: Index, ctx: EvalContext):
    obj = _eval(node.obj, ctx)
    idx = _eval(node.index, ctx)
    if isinstance(obj, StatResult):
        if not isinstance(idx, str):
            raise ExprEvalError("test results are indexed by field name")
        try:
            return obj[idx]
        except KeyError:
            raise ExprEvalError(f"no field {idx!r} in test result") from None
    if isinstance(obj, NamedVector) and isinstance(idx, str):
        try:
            return obj.values[obj.names.index(idx)]
        except ValueError:
            raise ExprEvalError(f"no element named {idx!r}") from None
    vec = as_vector(obj)
    if isinstance(idx, list):
        return [_index_one(vec, i) for i in idx]
    return _index_one(vec, idx)


def _index_one(vec: list, idx):
    i = as_int(idx)
    if not 1 <= i <= len(vec):
        raise ExprEvalError(f"index {i} outside 1..{len(vec)}")
    return vec[i - 1]


def _eval_call(node: Call, ctx: EvalContext):
    if node.name == "integrate":
        return _eval_integrate(node, ctx)
    fn = _BUILTINS.get(node.name)
    if fn is None:
        raise ExprEvalError(f"unknown function {node.name!r}")
    args = [_eval(a, ctx) for a in node.args]
    kwargs = {k: _eval(v, ctx) for k, v in node.kwargs}
    try:
        result = fn(ctx, args, kwargs)
    except (IndexError, TypeError) as e:
        raise ExprEvalError(f"wrong arguments for {node.name}: {e}") from None
    except (ValueError, OverflowError, ZeroDivisionError) as e:
        if isinstance(e, ExprError):
            raise
        raise ExprEvalError(f"{node.name}: {e}") from None
    if kwargs:
        raise ExprEvalError(
            f"unknown named argument {next(iter(kwargs))!r} for {node.name}")
    return result


def _eval_integrate(node: Call, ctx: EvalContext):
    if len(node.args) != 3:
        raise ExprEvalError("integrate(f(x), lower, upper) needs 3 arguments")
    body = node.args[0]
    lower = as_number(_eval(node.args[1], ctx))
    upper = as_number(_eval(node.args[2], ctx))
    inner_env = dict(ctx.env)
    inner = EvalContext(inner_env, ctx.rng)

    def f(t: float) -> float:
        inner_env["x"] = t
        return as_number(_eval(body, inner))

    try:
        return _simpson_integrate(f, lower, upper, tol=1e-8, max_depth=50)
    except IntegrationError as e:
        raise ExprEvalError(str(e)) from None
