"""Tree properties built from tolls summed over subtrees.

Two property families:

* :class:`AdditiveProperty` -- defined through the grafting recursion
  ``P(join(t1, t2)) = P(t1) + P(t2) + toll(t2)`` with ``P`` of the
  single-vertex tree equal to ``base``.  Equivalently ``P(T) = base *
  n_vertices(T) + sum(toll(T_v))`` over non-root vertices ``v``.

* :class:`PolynomialToll` -- a polynomial in the six subtree/whole-tree
  statistics ``(t, l0, l1, n, L0, L1)``: edges, leaves and internal count
  of the subtree at ``v`` (extended convention: ``v`` itself is counted by
  its down-degree) and of the whole tree (standard convention).  The
  property value is the toll summed over all non-root vertices; the
  single-vertex tree evaluates to 0.

Coefficients parsed from text are exact rationals; evaluation is exact
(int/Fraction) unless a float coefficient forces float mode.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable

import numpy as np

from .trees import Convention, PlaneTree, subtree_records

__all__ = [
    "AdditiveProperty",
    "PolynomialToll",
    "parse_toll",
    "eval_additive",
    "eval_polynomial_toll",
    "path_length",
    "wiener_index",
    "leaf_root_distance",
    "internal_root_distance",
    "NAMED_TOLLS",
]

VARIABLES = ("t", "l0", "l1", "n", "L0", "L1")


# ---------------------------------------------------------------------------
# additive properties (grafting recursion)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdditiveProperty:
    """A property determined by a toll on the grafted subtree and a base
    value on the single-vertex tree."""

    toll: Callable[[PlaneTree], float]
    base: float = 0
    name: str = ""

    def __call__(self, tree: PlaneTree):
        return eval_additive(self, tree)


def eval_additive(prop: AdditiveProperty, tree: PlaneTree):
    """Evaluate by the closed form: base * #vertices + sum of toll over
    the subtree at every non-root vertex."""
    total = prop.base * tree.n_vertices
    for v in range(1, tree.n_vertices):
        total = total + prop.toll(tree.subtree(v))
    return total


# ---------------------------------------------------------------------------
# polynomial tolls
# ---------------------------------------------------------------------------


class PolynomialToll:
    """Polynomial in (t, l0, l1, n, L0, L1) summed over non-root subtrees.

    ``monomials`` maps an exponent 6-tuple to its coefficient.  Construct
    via :func:`parse_toll` ("(t+1)*(n-t)"), from a mapping, or through
    arithmetic on the module-level variable tolls.
    """

    __slots__ = ("monomials", "text")

    def __init__(self, monomials: dict[tuple[int, ...], object], text: str = ""):
        clean: dict[tuple[int, ...], object] = {}
        for expo, coef in monomials.items():
            expo = tuple(int(e) for e in expo)
            if len(expo) != 6 or any(e < 0 for e in expo):
                raise ValueError(f"bad exponent tuple {expo}")
            if coef == 0:
                continue
            if isinstance(coef, Rational) and not isinstance(coef, Fraction):
                coef = Fraction(coef)
            clean[expo] = coef
        self.monomials = clean
        self.text = text or self._render()

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Rational) for c in self.monomials.values())

    @property
    def is_zero(self) -> bool:
        return not self.monomials

    def _render(self) -> str:
        if not self.monomials:
            return "0"
        parts = []
        for expo in sorted(self.monomials, reverse=True):
            coef = self.monomials[expo]
            factors = [
                v if e == 1 else f"{v}^{e}"
                for v, e in zip(VARIABLES, expo)
                if e
            ]
            body = "*".join(factors)
            if not factors:
                parts.append(str(coef))
            elif coef == 1:
                parts.append(body)
            elif coef == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{coef}*{body}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"PolynomialToll({self.text!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolynomialToll):
            return NotImplemented
        return self.monomials == other.monomials

    def __hash__(self):
        return hash(frozenset(self.monomials.items()))

    # -- polynomial ring operations -----------------------------------

    @classmethod
    def _coerce(cls, other) -> "PolynomialToll":
        if isinstance(other, PolynomialToll):
            return other
        if isinstance(other, Rational):
            return cls({(0,) * 6: Fraction(other)})
        if isinstance(other, float):
            return cls({(0,) * 6: other})
        raise TypeError(f"cannot use {other!r} as a toll")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.monomials)
        for expo, coef in other.monomials.items():
            out[expo] = out.get(expo, 0) + coef
        return PolynomialToll(out)

    __radd__ = __add__

    def __neg__(self):
        return PolynomialToll({e: -c for e, c in self.monomials.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict[tuple[int, ...], object] = {}
        for e1, c1 in self.monomials.items():
            for e2, c2 in other.monomials.items():
                expo = tuple(a + b for a, b in zip(e1, e2))
                out[expo] = out.get(expo, 0) + c1 * c2
        return PolynomialToll(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if set(other.monomials) not in (set(), {(0,) * 6}):
            raise ValueError("can only divide a toll by a constant")
        if other.is_zero:
            raise ZeroDivisionError("toll division by zero")
        const = other.monomials[(0,) * 6]
        return PolynomialToll(
            {e: c / const for e, c in self.monomials.items()}
        )

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("toll exponents must be non-negative integers")
        out = PolynomialToll({(0,) * 6: Fraction(1)})
        for _ in range(k):
            out = out * self
        return out

    # -- evaluation ----------------------------------------------------

    def term_value(self, t, l0, l1, n, L0, L1):
        """The toll at a single subtree, given the six statistics."""
        point = (t, l0, l1, n, L0, L1)
        total = 0
        for expo, coef in self.monomials.items():
            term = coef
            for base, e in zip(point, expo):
                for _ in range(e):
                    term = term * base
            total = total + term
        return total

    def __call__(self, tree: PlaneTree):
        return eval_polynomial_toll(self, tree)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(coefficients float64[M], exponents int64[M, 6]) for kernels."""
        m = len(self.monomials)
        coefs = np.empty(m, dtype=np.float64)
        expos = np.empty((m, 6), dtype=np.int64)
        for i, (expo, coef) in enumerate(sorted(self.monomials.items())):
            coefs[i] = float(coef)
            expos[i] = expo
        return coefs, expos


def eval_polynomial_toll(toll: PolynomialToll, tree: PlaneTree):
    """Sum the toll over all non-root subtrees of ``tree``.

    Subtree statistics use the extended convention; whole-tree statistics
    the standard one.  The single-vertex tree gives 0 (empty sum).
    """
    st = tree.stats()
    records = subtree_records(tree, Convention.EXTENDED)
    total = 0
    for rec in records[1:]:
        total = total + toll.term_value(
            rec.edges, rec.leaves, rec.internal, st.edges, st.leaves, st.internal
        )
    return total


# ---------------------------------------------------------------------------
# toll expression parser
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start():
            break
        pos = m.end()
        tok = m.group(1) or m.group(2) or m.group(3)
        if not tok.strip():
            continue
        if tok == "*" and tokens and tokens[-1] == "*":
            tokens[-1] = "^"  # fold ** into the power operator
            continue
        tokens.append(tok)
    return tokens


class _TollParser:
    """Recursive-descent parser: + - * / ^(or **) with parentheses.

    Grammar: expr := term (('+'|'-') term)*; term := factor (('*'|'/')
    factor)*; factor := ('-'|'+') factor | atom ('^' factor)?; atom :=
    number | variable | '(' expr ')'.
    """

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ValueError(f"unexpected end of toll expression: {self.text!r}")
        self.pos += 1
        return tok

    def parse(self) -> PolynomialToll:
        result = self.expr()
        if self.peek() is not None:
            raise ValueError(
                f"trailing input {self.peek()!r} in toll expression {self.text!r}"
            )
        result.text = self.text.strip()
        return result

    def expr(self) -> PolynomialToll:
        value = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> PolynomialToll:
        value = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take()
            rhs = self.factor()
            value = value * rhs if op == "*" else value / rhs
        return value

    def factor(self) -> PolynomialToll:
        tok = self.peek()
        if tok in ("+", "-"):
            self.take()
            value = self.factor()
            return value if tok == "+" else -value
        value = self.atom()
        if self.peek() == "^":
            self.take()
            value = value ** self._int_exponent()
        return value

    def _int_exponent(self) -> int:
        tok = self.take()
        if not tok.isdigit():
            raise ValueError(f"expected integer exponent, got {tok!r}")
        return int(tok)

    def atom(self) -> PolynomialToll:
        tok = self.take()
        if tok == "(":
            value = self.expr()
            if self.take() != ")":
                raise ValueError(f"missing ')' in toll expression {self.text!r}")
            return value
        if tok.isdigit():
            return PolynomialToll({(0,) * 6: Fraction(int(tok))})
        if tok in VARIABLES:
            expo = [0] * 6
            expo[VARIABLES.index(tok)] = 1
            return PolynomialToll({tuple(expo): Fraction(1)})
        raise ValueError(
            f"unknown symbol {tok!r} in toll expression {self.text!r}; "
            f"variables are {', '.join(VARIABLES)}"
        )


def parse_toll(text: str) -> PolynomialToll:
    """Parse a toll expression such as ``"(t+1)*(n-t)"`` or ``"l0 + l1^2"``."""
    return _TollParser(text).parse()


# convenience symbols for building tolls in code
t_, l0_, l1_, n_, L0_, L1_ = (
    PolynomialToll({tuple(1 if j == i else 0 for j in range(6)): Fraction(1)})
    for i in range(6)
)


# ---------------------------------------------------------------------------
# named properties with direct O(n) implementations
# ---------------------------------------------------------------------------


def path_length(tree: PlaneTree) -> int:
    """Sum over non-root vertices of the vertex count of their subtree;
    equals the sum of all root-to-vertex distances."""
    return int(tree.depths().sum())


def wiener_index(tree: PlaneTree) -> int:
    """Sum of pairwise vertex distances, via the edge-cut form
    sum (t_v + 1) * (n - t_v) over non-root v."""
    n = tree.n_edges
    t = tree.subtree_edge_counts()[1:]
    return int(((t + 1) * (n - t)).sum())


def leaf_root_distance(tree: PlaneTree) -> int:
    """Total distance from all leaves to the root."""
    down = tree.down_degrees
    depths = tree.depths()
    return int(depths[1:][down[1:] == 0].sum())


def internal_root_distance(tree: PlaneTree) -> int:
    """Total distance from all internal vertices to the root."""
    down = tree.down_degrees
    depths = tree.depths()
    return int(depths[1:][down[1:] == 1].sum())


NAMED_TOLLS: dict[str, PolynomialToll] = {
    "edges": parse_toll("1"),
    "path-length": parse_toll("t+1"),
    "wiener": parse_toll("(t+1)*(n-t)"),
    "leaf-depth": parse_toll("l0"),
    "internal-depth": parse_toll("l1"),
}
