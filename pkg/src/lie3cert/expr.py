"""A small exact evaluator for the registry's expression syntax.

Expressions are ordinary Python arithmetic (`+ - * / **`, parentheses,
integer literals, nested lists for matrices, `diag(a, b, c)`, `conj(x)`, `inv(x)`), parsed with
`ast` and evaluated over FieldElement and Mat3. Nothing else is allowed.
"""
from __future__ import annotations

import ast
from functools import lru_cache
from typing import Mapping

from .exactfield import I, ONE, R2, R3, R6, FieldElement, as_fe
from .linalg3 import Mat3

SCALAR_NAMES = {"r2": R2, "r3": R3, "r6": R6, "i": I}


class ExprError(ValueError):
    pass


@lru_cache(maxsize=8192)
def _parse(text: str) -> ast.expr:
    try:
        return ast.parse(text.strip(), mode="eval").body
    except SyntaxError as exc:
        raise ExprError(f"cannot parse {text!r}: {exc.msg}") from None


FUNCTIONS = ("diag", "conj", "inv")


def free_names(text: str) -> set[str]:
    """Symbols an expression refers to, excluding function names."""
    tree = _parse(text)
    called = {id(n.func) for n in ast.walk(tree) if isinstance(n, ast.Call)}
    return {n.id for n in ast.walk(tree) if isinstance(n, ast.Name) and id(n) not in called}


def evaluate(text: str, env: Mapping[str, object]):
    return _eval(_parse(text), env, text)


def _lookup(name: str, env: Mapping[str, object], text: str):
    if name in env:
        return env[name]
    if name in SCALAR_NAMES:
        return SCALAR_NAMES[name]
    raise ExprError(f"unknown symbol {name!r} in {text!r}")


def _eval(node: ast.expr, env, text: str):
    if isinstance(node, ast.Constant):
        if isinstance(node.value, int) and not isinstance(node.value, bool):
            return as_fe(node.value)
        raise ExprError(f"only integer literals are allowed in {text!r}")
    if isinstance(node, ast.Name):
        return _lookup(node.id, env, text)
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, env, text)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
    if isinstance(node, ast.BinOp):
        a = _eval(node.left, env, text)
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                raise ExprError(f"exponents must be integer literals in {text!r}")
            return a ** node.right.value
        b = _eval(node.right, env, text)
        op = node.op
        if isinstance(op, ast.Add):
            return a + b
        if isinstance(op, ast.Sub):
            return a - b
        if isinstance(op, ast.Mult):
            if isinstance(a, Mat3) and isinstance(b, FieldElement):
                return a.scale(b)
            return a * b
        if isinstance(op, ast.Div):
            if isinstance(b, Mat3):
                raise ExprError(f"division by a matrix in {text!r}")
            if b.is_zero():
                raise ZeroDivisionError(f"division by zero in {text!r}")
            if isinstance(a, Mat3):
                return a.scale(b.inv())
            return a / b
    if isinstance(node, ast.List):
        rows = [_eval(e, env, text) for e in node.elts]
        if len(rows) == 3 and all(
            isinstance(r, list) and len(r) == 3 and all(isinstance(x, FieldElement) for x in r)
            for r in rows
        ):
            return Mat3(rows)
        return rows
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        args = [_eval(a, env, text) for a in node.args]
        if node.func.id == "diag" and len(args) == 3:
            return Mat3.diag(*args)
        if node.func.id == "conj" and len(args) == 1:
            return args[0].conj()
        if node.func.id == "inv" and len(args) == 1:
            return args[0].inv()
        raise ExprError(f"unknown function {node.func.id!r} in {text!r}")
    raise ExprError(f"unsupported syntax in {text!r}")


def eval_matrix(text: str, env: Mapping[str, object]) -> Mat3:
    v = evaluate(text, env)
    if isinstance(v, Mat3):
        return v
    if isinstance(v, list) and len(v) == 3 and all(isinstance(r, list) and len(r) == 3 for r in v):
        return Mat3([[as_fe(x) for x in r] for r in v])
    raise ExprError(f"{text!r} does not evaluate to a 3x3 matrix")


def eval_scalar(text: str, env: Mapping[str, object]) -> FieldElement:
    v = evaluate(text, env)
    if not isinstance(v, FieldElement):
        raise ExprError(f"{text!r} does not evaluate to a scalar")
    return v


__all__ = ["ExprError", "evaluate", "eval_matrix", "eval_scalar", "free_names", "ONE"]
