"""The input language: expressions for curves and surfaces, and JSON spec files.

Grammar (lowest to highest precedence)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary | power)*      # juxtaposition after a literal
    unary   := '-' unary | '+' unary | power
    power   := atom (('^' | '**') exponent)?
    atom    := number | 'i' | symbol | func '(' expr ')' | '(' expr ')'
    func    := 'exp' | 'sin' | 'cos' | 'sqrt' | 'sqrt[principal]' | 'sqrt[other]'

Numbers accept an optional trailing ``i`` (``3i``, ``1.5e-3i``) and may be
followed directly by a factor (``4t^2``, ``2(t+1)``); ``a+bi`` with
two plain literals folds into one complex literal.  Exponents are non-negative
integer literals, optionally parenthesized.  A bare ``sqrt`` follows the
analysis-wide branch option.

Spec files are JSON objects::

    {"kind": "plane_curve" | "space_curve" | "surface" | "algebraic_curve",
     "components": ["t", "t^2"],                       # expression kinds
     "degree": 2, "coefficients": {"2,0": 1, ...},     # algebraic_curve
     "domain": {"t": {"re": [-1, 1], "im": [-1, 1]}},
     "options": {"branch": "principal", "tol_iso": 1e-10, ...},
     "analyses": [{"type": "evolute", "samples": 100}, ...]}

Coefficients are a number, a decimal string, ``[re, im]`` or
``[re_num, re_den, im_num, im_den]``.
"""
from __future__ import annotations

import cmath
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cplx import Branch, sqrt_branched
from .exact import GaussQ


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        self.bare = message
        super().__init__(f"{message} at line {line}, column {column}")


class DomainError(ArithmeticError):
    """Expression evaluated outside its domain (division by zero)."""


# -- AST -------------------------------------------------------------------------


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    value: complex


@dataclass(frozen=True)
class Sym(Expr):
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # one of + - * /
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Call(Expr):
    fn: str  # exp, sin, cos, sqrt
    arg: Expr
    branch: Branch | None = None


FUNCTIONS = ("exp", "sin", "cos", "sqrt")
SYMBOLS = ("t", "z1", "z2")

# -- tokenizer -------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*(?:\[[A-Za-z]+\])?)
  | (?P<op>\*\*|[-+*/^()])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(src: str) -> list[_Tok]:
    toks = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind == "ws":
            nl = text.count("\n")
            if nl:
                line += nl
                line_start = pos + text.rfind("\n") + 1
        else:
            toks.append(_Tok(kind, text, line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("end", "", line, pos - line_start + 1))
    return toks


def _literal(text: str) -> complex:
    if text.endswith("i"):
        return complex(0.0, float(text[:-1]))
    return complex(float(text), 0.0)


class _Parser:
    def __init__(self, src: str, symbols):
        self.toks = _tokenize(src)
        self.k = 0
        self.symbols = symbols

    def peek(self) -> _Tok:
        return self.toks[self.k]

    def take(self) -> _Tok:
        t = self.toks[self.k]
        self.k += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def expect(self, text):
        tok = self.peek()
        if tok.text != text:
            what = "end of input" if tok.kind == "end" else repr(tok.text)
            self.fail(f"expected {text!r}, found {what}")
        return self.take()

    def parse(self) -> Expr:
        e = self.expr()
        if self.peek().kind != "end":
            self.fail(f"unexpected {self.peek().text!r}")
        return e

    def expr(self) -> Expr:
        first = self.peek()
        left = self.term()
        folded = False
        while self.peek().text in ("+", "-"):
            op = self.take().text
            start = self.peek()
            right = self.term()
            if (
                not folded
                and left is not None
                and first.kind == "num"
                and isinstance(left, Num)
                and not first.text.endswith("i")
                and start.kind == "num"
                and start.text.endswith("i")
                and isinstance(right, Num)
                and self._plain_literal(start)
            ):
                # a+bi written out: one complex literal
                left = Num(left.value + (right.value if op == "+" else -right.value))
                folded = True
                continue
            folded = True
            left = BinOp(op, left, right)
        return left

    def _plain_literal(self, start: _Tok) -> bool:
        # the term just parsed was exactly the literal token
        return self.toks[self.k - 1] is start

    def term(self) -> Expr:
        left = self.unary()
        while True:
            tok = self.peek()
            if tok.text in ("*", "/"):
                op = self.take().text
                left = BinOp(op, left, self.unary())
            elif self._after_literal() and (tok.kind == "name" or tok.text == "("):
                # juxtaposed coefficient: 4t^2, 2i sin(t)
                left = BinOp("*", left, self.power())
            else:
                return left

    def _after_literal(self) -> bool:
        prev = self.toks[self.k - 1]
        before = self.toks[self.k - 2].text if self.k >= 2 else ""
        return prev.kind == "num" and before not in ("^", "**")

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.text == "-":
            self.take()
            return Neg(self.unary())
        if tok.text == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().text in ("^", "**"):
            self.take()
            base = Pow(base, self.exponent())
            if self.peek().text in ("^", "**"):
                self.fail("chained powers need parentheses")
        return base

    def exponent(self) -> int:
        tok = self.peek()
        paren = tok.text == "("
        if paren:
            self.take()
            tok = self.peek()
        if tok.kind != "num":
            self.fail("exponent must be a non-negative integer literal", tok)
        self.take()
        text = tok.text
        if text.endswith("i") or not re.fullmatch(r"\d+", text):
            self.fail(f"non-integer exponent {text!r}", tok)
        if paren:
            self.expect(")")
        return int(text)

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "num":
            self.take()
            return Num(_literal(tok.text))
        if tok.text == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "name":
            self.take()
            name = tok.text
            fn, _, br = name.partition("[")
            if fn in FUNCTIONS:
                branch = None
                if br:
                    if fn != "sqrt":
                        self.fail(f"only sqrt takes a branch, not {fn}", tok)
                    try:
                        branch = Branch.parse(br.rstrip("]"))
                    except ValueError as exc:
                        raise ParseError(str(exc), tok.line, tok.col) from None
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(fn, arg, branch)
            if br:
                self.fail(f"unknown identifier {name!r}", tok)
            if name == "i":
                return Num(1j)
            if name in self.symbols:
                return Sym(name)
            self.fail(f"unknown identifier {name!r}", tok)
        if tok.kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected {tok.text!r}")


def parse(source: str, symbols=SYMBOLS) -> Expr:
    """Parse expression text into an AST.

    Identifiers outside ``symbols`` raise :class:`ParseError`; a spec-level
    check for symbols that do not fit the kind lives in :func:`validate`.
    """
    if not isinstance(source, str):
        raise TypeError("expression source must be a string")
    return _Parser(source, tuple(symbols)).parse()


# -- printing --------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _fmt_num(z: complex) -> tuple[str, int]:
    re_, im_ = z.real, z.imag
    if im_ == 0 and re_ >= 0:
        return _fmt_real(re_), 5
    if re_ == 0 and im_ > 0:
        return ("i" if im_ == 1 else _fmt_real(im_) + "i"), 5
    if im_ == 0:
        return f"(-{_fmt_real(-re_)})", 5
    if re_ == 0:
        return f"(-{_fmt_real(-im_)}i)", 5
    sign = "+" if im_ > 0 else "-"
    return f"({_fmt_real(re_)}{sign}{_fmt_real(abs(im_))}i)", 5


def _pp(e: Expr) -> tuple[str, int]:
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, Sym):
        return e.name, 5
    if isinstance(e, Call):
        name = e.fn if e.branch is None else f"{e.fn}[{e.branch.value}]"
        return f"{name}({_pp(e.arg)[0]})", 5
    if isinstance(e, Pow):
        s, p = _pp(e.base)
        if p < 5:
            s = f"({s})"
        return f"{s}^{e.exponent}", 4
    if isinstance(e, Neg):
        s, p = _pp(e.arg)
        if p < 3:
            s = f"({s})"
        return f"-{s}", 3
    if isinstance(e, BinOp):
        prec = _PREC[e.op]
        ls, lp = _pp(e.left)
        rs, rp = _pp(e.right)
        if lp < prec:
            ls = f"({ls})"
        if rp <= prec:
            rs = f"({rs})"
        return f"{ls} {e.op} {rs}", prec
    raise TypeError(f"not an expression node: {e!r}")


def pretty(e: Expr) -> str:
    return _pp(e)[0]


# -- evaluation ------------------------------------------------------------------


def free_symbols(e: Expr) -> set[str]:
    if isinstance(e, Sym):
        return {e.name}
    if isinstance(e, Num):
        return set()
    if isinstance(e, (Neg, Call)):
        return free_symbols(e.arg)
    if isinstance(e, Pow):
        return free_symbols(e.base)
    if isinstance(e, BinOp):
        return free_symbols(e.left) | free_symbols(e.right)
    raise TypeError(f"not an expression node: {e!r}")


def _array_sqrt(x: np.ndarray, branch: Branch) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    arg = np.angle(x)
    if branch is Branch.PRINCIPAL:
        arg = np.where(arg <= -np.pi, np.pi, arg)
    else:
        arg = np.where(arg < 0, arg + 2 * np.pi, arg)
    return np.sqrt(np.abs(x)) * np.exp(0.5j * arg)


def _apply(fn: str, x, branch: Branch):
    from .jets import _Jet

    if isinstance(x, _Jet):
        return x.sqrt(branch) if fn == "sqrt" else getattr(x, fn)()
    if isinstance(x, np.ndarray):
        if fn == "sqrt":
            return _array_sqrt(x, branch)
        return getattr(np, fn)(x)
    x = complex(x)
    if fn == "sqrt":
        return sqrt_branched(x, branch).value
    return getattr(cmath, fn)(x)


def evaluate(e: Expr, env: dict, branch: Branch | str = Branch.PRINCIPAL):
    """Evaluate on complex numbers, numpy arrays, or jets (whatever ``env`` holds)."""
    branch = Branch.parse(branch)

    def ev(n):
        if isinstance(n, Num):
            return n.value
        if isinstance(n, Sym):
            try:
                return env[n.name]
            except KeyError:
                raise DomainError(f"symbol {n.name!r} has no value") from None
        if isinstance(n, Neg):
            return -ev(n.arg)
        if isinstance(n, Pow):
            b = ev(n.base)
            if isinstance(b, (complex, float, int)):
                return complex(b) ** n.exponent if n.exponent else 1 + 0j
            return b**n.exponent
        if isinstance(n, Call):
            return _apply(n.fn, ev(n.arg), n.branch or branch)
        if isinstance(n, BinOp):
            a, b = ev(n.left), ev(n.right)
            if n.op == "+":
                return a + b
            if n.op == "-":
                return a - b
            if n.op == "*":
                return a * b
            if isinstance(b, np.ndarray) and np.any(b == 0):
                raise DomainError("division by zero")
            try:
                return a / b
            except ZeroDivisionError:
                raise DomainError("division by zero") from None
        raise TypeError(f"not an expression node: {n!r}")

    return ev(e)


def compile_expr(e: Expr, branch: Branch | str = Branch.PRINCIPAL):
    """Callable ``f(**values)`` evaluating ``e``."""
    branch = Branch.parse(branch)
    return lambda **env: evaluate(e, env, branch)


# -- spec files ------------------------------------------------------------------

KINDS = {"plane_curve": 2, "space_curve": 3, "surface": 3, "algebraic_curve": None}
PARAMS = {"plane_curve": ("t",), "space_curve": ("t",), "surface": ("z1", "z2"), "algebraic_curve": ("z1", "z2")}
ANALYSES = {
    "plane_curve": {"invariants_at", "isotropic_points", "evolute", "contact", "inflections", "vertices", "hermitian_jacobian"},
    "space_curve": {"invariants_at", "contact"},
    "surface": {"forms_at", "contact", "focal_at", "locus"},
    "algebraic_curve": {"hypotheses", "isotropic_points", "inflections", "vertices"},
}
DEFAULT_OPTIONS = {
    "branch": "principal",
    "tol_iso": 1e-10,
    "tol_rel": 1e-8,
    "root_tol": 1e-8,
    "samples": 100,
    "grid": 16,
}


@dataclass(frozen=True)
class Box:
    """Closed rectangle [re_min, re_max] x [im_min, im_max] in C."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    @property
    def empty(self) -> bool:
        return not (self.re_min < self.re_max and self.im_min < self.im_max)

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (
            self.re_min - pad <= z.real <= self.re_max + pad
            and self.im_min - pad <= z.imag <= self.im_max + pad
        )

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def scale(self) -> float:
        return max(self.re_max - self.re_min, self.im_max - self.im_min)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    path: str = ""


@dataclass
class GeomSpec:
    kind: str
    components: tuple[Expr, ...] | None = None
    sources: tuple[str, ...] = ()
    coefficients: dict | None = None  # (i, j) -> GaussQ
    degree: int | None = None
    domain: dict[str, Box] = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    analyses: list = field(default_factory=list)
    parse_diagnostics: list = field(default_factory=list)

    @property
    def branch(self) -> Branch:
        return Branch.parse(self.options.get("branch", "principal"))

    def option(self, name):
        return self.options.get(name, DEFAULT_OPTIONS.get(name))


def _box(raw, path, diags) -> Box | None:
    try:
        if isinstance(raw, dict):
            r, i = raw["re"], raw.get("im", [0.0, 0.0])
        else:
            r, i = raw
        return Box(float(r[0]), float(r[1]), float(i[0]), float(i[1]))
    except (KeyError, TypeError, ValueError, IndexError):
        diags.append(Diagnostic("bad_domain", f"cannot read rectangle {raw!r}", path))
        return None


def spec_from_dict(doc: dict) -> GeomSpec:
    """Build a :class:`GeomSpec`; problems are recorded, not raised."""
    diags: list[Diagnostic] = []
    if not isinstance(doc, dict):
        return GeomSpec(kind="", parse_diagnostics=[Diagnostic("bad_document", "spec must be a JSON object")])
    kind = doc.get("kind", "")
    spec = GeomSpec(kind=kind)
    spec.options = dict(doc.get("options", {}))
    spec.analyses = list(doc.get("analyses", []))
    if "components" in doc:
        srcs = doc["components"]
        if not isinstance(srcs, list) or not all(isinstance(s, str) for s in srcs):
            diags.append(Diagnostic("bad_components", "components must be a list of strings", "components"))
        else:
            spec.sources = tuple(srcs)
            parsed = []
            for k, s in enumerate(srcs):
                try:
                    parsed.append(parse(s, symbols=SYMBOLS))
                except ParseError as exc:
                    code = "unknown_symbol" if "unknown identifier" in exc.bare else "parse_error"
                    diags.append(Diagnostic(code, str(exc), f"components[{k}]"))
                    parsed.append(None)
            if all(p is not None for p in parsed):
                spec.components = tuple(parsed)
    if "coefficients" in doc:
        coeffs = {}
        for key, val in dict(doc["coefficients"]).items():
            try:
                i, j = (int(x) for x in str(key).split(","))
                if i < 0 or j < 0:
                    raise ValueError
            except ValueError:
                diags.append(Diagnostic("bad_coefficient", f"bad monomial key {key!r}", f"coefficients.{key}"))
                continue
            try:
                c = GaussQ.of(val)
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                diags.append(Diagnostic("bad_coefficient", str(exc), f"coefficients.{key}"))
                continue
            if c:
                coeffs[(i, j)] = coeffs.get((i, j), GaussQ()) + c
        spec.coefficients = coeffs
        spec.degree = doc.get("degree")
    for name, raw in dict(doc.get("domain", {})).items():
        b = _box(raw, f"domain.{name}", diags)
        if b is not None:
            spec.domain[name] = b
    spec.parse_diagnostics = diags
    return spec


def load_spec(source) -> GeomSpec:
    """Read a spec from a path, JSON text, or an already-decoded dict."""
    if isinstance(source, dict):
        return spec_from_dict(source)
    p = Path(source)
    text = p.read_text() if p.exists() else str(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        return GeomSpec(kind="", parse_diagnostics=[Diagnostic("bad_json", str(exc))])
    return spec_from_dict(doc)


def validate(spec: GeomSpec) -> list[Diagnostic]:
    """All well-formedness problems of ``spec``; empty means valid."""
    diags = list(spec.parse_diagnostics)
    if spec.kind not in KINDS:
        diags.append(Diagnostic("bad_kind", f"unknown kind {spec.kind!r}", "kind"))
        return diags
    params = PARAMS[spec.kind]
    if spec.kind == "algebraic_curve":
        if spec.coefficients is None:
            diags.append(Diagnostic("missing_field", "algebraic_curve needs coefficients", "coefficients"))
        else:
            d = spec.degree
            actual = max((i + j for i, j in spec.coefficients), default=-1)
            if not isinstance(d, int) or d < 1:
                diags.append(Diagnostic("degree_mismatch", f"declared degree {d!r} is not a positive integer", "degree"))
            elif actual != d:
                diags.append(
                    Diagnostic("degree_mismatch", f"declared degree {d} but coefficients have total degree {actual}", "degree")
                )
        if spec.sources:
            diags.append(Diagnostic("component_count", "algebraic_curve takes coefficients, not components", "components"))
    else:
        n = KINDS[spec.kind]
        if not spec.sources and spec.components is None and not any(
            d.path.startswith("components") for d in diags
        ):
            diags.append(Diagnostic("missing_field", f"{spec.kind} needs components", "components"))
        elif spec.sources and len(spec.sources) != n:
            diags.append(
                Diagnostic("component_count", f"{spec.kind} needs {n} components, got {len(spec.sources)}", "components")
            )
        if spec.components is not None:
            for k, c in enumerate(spec.components):
                bad = free_symbols(c) - set(params)
                if bad:
                    diags.append(
                        Diagnostic(
                            "unknown_symbol",
                            f"symbol(s) {sorted(bad)} not allowed in a {spec.kind}; use {', '.join(params)}",
                            f"components[{k}]",
                        )
                    )
    for name, box in spec.domain.items():
        if name not in params:
            diags.append(Diagnostic("unknown_symbol", f"domain variable {name!r} not a parameter", f"domain.{name}"))
        # a segment (zero height or width) is a valid sampling domain; inverted or point boxes are not
        if box.re_min > box.re_max or box.im_min > box.im_max or (box.re_min == box.re_max and box.im_min == box.im_max):
            diags.append(Diagnostic("empty_domain", f"domain rectangle for {name} is empty", f"domain.{name}"))
    if spec.kind != "algebraic_curve":
        for p in params:
            if p not in spec.domain:
                diags.append(Diagnostic("empty_domain", f"no domain given for {p}", f"domain.{p}"))
    try:
        Branch.parse(spec.options.get("branch", "principal"))
    except ValueError as exc:
        diags.append(Diagnostic("bad_option", str(exc), "options.branch"))
    for key in ("tol_iso", "tol_rel", "root_tol"):
        if key in spec.options:
            v = spec.options[key]
            if not isinstance(v, (int, float)) or not v > 0:
                diags.append(Diagnostic("bad_option", f"{key} must be positive", f"options.{key}"))
    for k, a in enumerate(spec.analyses):
        t = a.get("type") if isinstance(a, dict) else None
        if t not in ANALYSES[spec.kind]:
            diags.append(Diagnostic("analysis_kind_mismatch", f"analysis {t!r} not available for {spec.kind}", f"analyses[{k}]"))
    return diags
