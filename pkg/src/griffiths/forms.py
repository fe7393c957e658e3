"""
Sparse polynomial differential forms in the α-variables.

A form is a mapping from a strictly increasing tuple of 0-based variable
positions (the dα factors) to a sympy coefficient.
"""

from typing import Dict, Sequence, Tuple

import sympy as sp

Form = Dict[Tuple[int, ...], sp.Expr]


def _clean(form: Form) -> Form:
    cleaned = {}
    for key, coeff in form.items():
        coeff = sp.expand(coeff)
        if coeff != 0:
            cleaned[key] = coeff
    return cleaned


def _insert(index: int, key: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    """dα_index ∧ dα_key as (sign, sorted key); sign 0 when index is already present."""
    if index in key:
        return 0, key
    position = sum(1 for k in key if k < index)
    return (-1) ** position, tuple(sorted(key + (index,)))


def add(*forms: Form) -> Form:
    total: Form = {}
    for form in forms:
        for key, coeff in form.items():
            total[key] = total.get(key, 0) + coeff
    return _clean(total)


def scale(form: Form, factor: sp.Expr) -> Form:
    return _clean({key: factor * coeff for key, coeff in form.items()})


def is_zero(form: Form) -> bool:
    return not _clean(form)


def omega_form(alphas: Sequence[sp.Symbol]) -> Form:
    """Ω = ∑ (−1)^i α_i dα_0∧…∧dα_i-hat∧…∧dα_{n−1}."""
    n = len(alphas)
    return {
        tuple(k for k in range(n) if k != i): (-1) ** i * alphas[i]
        for i in range(n)
    }


def interior(vector: Sequence[sp.Expr], form: Form) -> Form:
    """Contraction ι_A with the vector field ∑ A_i ∂/∂α_i."""
    result: Form = {}
    for key, coeff in form.items():
        for position, index in enumerate(key):
            reduced = key[:position] + key[position + 1 :]
            result[reduced] = result.get(reduced, 0) + (-1) ** position * vector[index] * coeff
    return _clean(result)


def exterior_derivative(form: Form, alphas: Sequence[sp.Symbol]) -> Form:
    result: Form = {}
    for key, coeff in form.items():
        for index, alpha in enumerate(alphas):
            sign, new_key = _insert(index, key)
            if sign == 0:
                continue
            derivative = sp.diff(coeff, alpha)
            if derivative != 0:
                result[new_key] = result.get(new_key, 0) + sign * derivative
    return _clean(result)


def wedge_one_form(one_form: Sequence[sp.Expr], form: Form) -> Form:
    """(∑ c_i dα_i) ∧ form."""
    result: Form = {}
    for key, coeff in form.items():
        for index, c in enumerate(one_form):
            if c == 0:
                continue
            sign, new_key = _insert(index, key)
            if sign:
                result[new_key] = result.get(new_key, 0) + sign * c * coeff
    return _clean(result)


def gradient(poly: sp.Expr, alphas: Sequence[sp.Symbol]) -> Tuple[sp.Expr, ...]:
    return tuple(sp.diff(poly, alpha) for alpha in alphas)


def restrict_to_face(form: Form, index: int, alphas: Sequence[sp.Symbol]) -> Form:
    """Pull back to α_index = 0; keys are re-indexed to the remaining variables."""
    result: Form = {}
    for key, coeff in form.items():
        if index in key:
            continue
        new_key = tuple(k if k < index else k - 1 for k in key)
        result[new_key] = coeff.subs(alphas[index], 0)
    return _clean(result)


def removed_pairs(form: Form, n: int) -> Dict[Tuple[int, int], sp.Expr]:
    """For an (n−2)-form, coefficient keyed by the pair of omitted differentials."""
    table = {}
    for key, coeff in form.items():
        missing = tuple(k for k in range(n) if k not in key)
        table[missing] = coeff
    return table


def forms_equal(left: Form, right: Form) -> bool:
    return is_zero(add(left, scale(right, -1)))


__all__ = [
    "Form",
    "add",
    "scale",
    "is_zero",
    "omega_form",
    "interior",
    "exterior_derivative",
    "wedge_one_form",
    "gradient",
    "restrict_to_face",
    "removed_pairs",
    "forms_equal",
]
