"""Exact arithmetic in the four cyclic sextic CM fields K_1, ..., K_4."""

from .classgroup import ClassGroupData, class_group_data, root_in_field
from .field import DEGREE, CorruptedFieldData, NFElement, NumberField, PrecisionError, load_field
from .ideal import Ideal, PrimeIdeal, cubic_subfield_split, factor_ideal, galois_apply, split_prime
from .lattice import NotPrincipalError, is_principal, lll, principal_generator

__all__ = [
    "DEGREE", "ClassGroupData", "CorruptedFieldData", "Ideal", "NFElement", "NotPrincipalError",
    "NumberField", "PrecisionError", "PrimeIdeal", "class_group_data", "cubic_subfield_split",
    "factor_ideal", "galois_apply",
    "is_principal", "lll", "load_field", "principal_generator", "root_in_field", "split_prime",
]
