"""Frobenius traces of cyclic p-fold covers Y^p = F(X) over small finite fields."""

from __future__ import annotations

from .cyclotomic import CyclotomicInt
from .gf import FieldSpec, MultCharacter, char_eval, field_of_size, make_character, make_field
from .polyring import FactorTuple, enumerate_factor_tuples
from .rvmodel import Histogram, RVModel, model_new, sum_distribution

__version__ = "0.1.0"

__all__ = [
    "CyclotomicInt",
    "FactorTuple",
    "FieldSpec",
    "Histogram",
    "MultCharacter",
    "RVModel",
    "char_eval",
    "enumerate_factor_tuples",
    "field_of_size",
    "make_character",
    "make_field",
    "model_new",
    "sum_distribution",
    "__version__",
]
