"""Edge-length triples and the small expression language used to write them."""
from __future__ import annotations

import ast
from dataclasses import dataclass

import mpmath
from mpmath import mpf


class NotInLambda(ValueError):
    """Lengths violate a triangle inequality or are not positive."""


class LengthExpressionError(ValueError):
    pass


_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Div: lambda a, b: a / b,
    ast.Pow: lambda a, b: a**b,
}


def eval_length(text: str) -> mpf:
    """Evaluate a length expression at working precision.

    Accepts decimals, rationals such as ``3/4``, ``sqrt(...)``, ``phi`` and the
    operators ``+ - * /`` with parentheses.  Literals are read from their
    source text so ``1.1`` means exactly eleven tenths.
    """
    src = text.strip()
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise LengthExpressionError(f"cannot parse length {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return mpf(ast.get_source_segment(src, node))
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.Name) and node.id == "phi":
            return (1 + mpmath.sqrt(5)) / 2
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id == "sqrt"
            and len(node.args) == 1
            and not node.keywords
        ):
            return mpmath.sqrt(ev(node.args[0]))
        raise LengthExpressionError(f"unsupported construct in length {text!r}")

    return ev(tree)


@dataclass(frozen=True)
class LengthTriple:
    """Edge lengths of colours 1, 2 and 3."""

    a: mpf
    b: mpf
    c: mpf

    def __post_init__(self):
        for name in "abc":
            object.__setattr__(self, name, mpf(getattr(self, name)))

    def __iter__(self):
        return iter((self.a, self.b, self.c))

    def __getitem__(self, colour: int) -> mpf:
        """Length of colour 1, 2 or 3."""
        return (self.a, self.b, self.c)[colour - 1]

    def in_lambda(self) -> bool:
        a, b, c = self
        return a > 0 and b > 0 and c > 0 and a + b >= c and a + c >= b and b + c >= a

    def non_obtuse(self) -> bool:
        a, b, c = (t * t for t in self)
        return a + b >= c and b + c >= a and a + c >= b

    def check(self) -> "LengthTriple":
        if not self.in_lambda():
            raise NotInLambda(f"{tuple(float(t) for t in self)} violates the triangle inequality")
        return self

    def sorted(self) -> tuple[mpf, mpf, mpf]:
        return tuple(sorted(self))  # type: ignore[return-value]

    def normalised(self) -> tuple[mpf, mpf, mpf]:
        """Sorted lengths scaled so the smallest is 1."""
        s = self.sorted()
        return (mpf(1), s[1] / s[0], s[2] / s[0])

    def matches(self, other, tol: float = 1e-8, scale_free: bool = True) -> bool:
        """Multiset comparison, optionally up to a common scale factor."""
        if scale_free:
            p = self.normalised()
            q = LengthTriple(*other).normalised()
        else:
            p, q = self.sorted(), LengthTriple(*other).sorted()
        return all(abs(x - y) <= tol for x, y in zip(p, q))

    def as_floats(self) -> tuple[float, float, float]:
        return (float(self.a), float(self.b), float(self.c))
