"""Parametrized curves and surfaces given by expressions or jet-evaluable callables."""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .cplx import Branch
from .expr import Expr, GeomSpec, evaluate, parse
from .jets import DEFAULT_CURVE_ORDER, DEFAULT_SURFACE_ORDER, Jet1, Jet2


def _as_exprs(components) -> list:
    out = []
    for c in components:
        out.append(parse(c) if isinstance(c, str) else c)
    return out


class ParamCurve:
    """t -> (x_1(t), ..., x_n(t)).

    Components are expression strings, parsed ASTs, or callables taking a
    :class:`Jet1` (or complex number) and returning the same kind of object.
    ``branch`` resolves bare ``sqrt`` in expressions.
    """

    def __init__(self, components: Sequence, branch: Branch | str = Branch.PRINCIPAL):
        self.components = _as_exprs(components)
        self.branch = Branch.parse(branch)

    @classmethod
    def from_spec(cls, spec: GeomSpec, branch=None):
        return cls(spec.components, branch or spec.branch)

    @property
    def dim(self) -> int:
        return len(self.components)

    def with_branch(self, branch) -> "ParamCurve":
        return type(self)(self.components, branch)

    def _eval(self, comp, x):
        if isinstance(comp, Expr):
            return evaluate(comp, {"t": x}, self.branch)
        return comp(x)

    def jets(self, t: complex, order: int = DEFAULT_CURVE_ORDER) -> list[Jet1]:
        var = Jet1.variable(complex(t), order)
        out = []
        for comp in self.components:
            v = self._eval(comp, var)
            out.append(v if isinstance(v, Jet1) else Jet1.constant(v, complex(t), order))
        return out

    def __call__(self, t) -> np.ndarray:
        if isinstance(t, np.ndarray):
            return np.array([np.broadcast_to(self._eval(c, t), t.shape) for c in self.components])
        return np.array([complex(self._eval(c, complex(t))) for c in self.components])

    def transformed(self, R: np.ndarray, b) -> "ParamCurve":
        """The curve R.gamma + b (R any complex matrix)."""
        base = self
        n = self.dim
        R = np.asarray(R, dtype=complex)
        b = np.asarray(b, dtype=complex)

        def comp(k: int) -> Callable:
            def f(x):
                vals = [base._eval(c, x) for c in base.components]
                acc = complex(b[k])
                for j in range(n):
                    acc = complex(R[k, j]) * vals[j] + acc
                return acc

            return f

        return ParamCurve([comp(k) for k in range(n)], self.branch)


class ParamSurface:
    """(z1, z2) -> (x_1, x_2, x_3)."""

    def __init__(self, components: Sequence, branch: Branch | str = Branch.PRINCIPAL):
        self.components = _as_exprs(components)
        self.branch = Branch.parse(branch)

    @classmethod
    def from_spec(cls, spec: GeomSpec, branch=None):
        return cls(spec.components, branch or spec.branch)

    def with_branch(self, branch) -> "ParamSurface":
        return type(self)(self.components, branch)

    def _eval(self, comp, z1, z2):
        if isinstance(comp, Expr):
            return evaluate(comp, {"z1": z1, "z2": z2}, self.branch)
        return comp(z1, z2)

    def jets(self, q, order: int = DEFAULT_SURFACE_ORDER) -> list[Jet2]:
        q = (complex(q[0]), complex(q[1]))
        z1, z2 = Jet2.variables(q, order)
        out = []
        for comp in self.components:
            v = self._eval(comp, z1, z2)
            out.append(v if isinstance(v, Jet2) else Jet2.constant(v, q, order))
        return out

    def __call__(self, z1, z2) -> np.ndarray:
        return np.array([complex(self._eval(c, complex(z1), complex(z2))) for c in self.components])
