"""Certificates that every polynomial vector field on n-space is generated by two fields."""

from .algebra import DimensionError, Polynomial
from .certificate import Certificate, CertificateError, deserialize, evaluate, metrics, serialize
from .flow import (BlowUp, FlowRequest, FlowResult, Inconclusive, Nilpotent, NotNilpotent,
                   Reached, StepUnderflow, check_closed_form_V2, check_locally_nilpotent,
                   integrate)
from .generator import CertStore, generate_field, verify
from .parse import ParseError, format_field, parse_field
from .vectorfield import VectorField, ad_iter, apply_to_poly, lie_bracket, standard_generators

__all__ = [
    "BlowUp", "CertStore", "Certificate", "CertificateError", "DimensionError",
    "FlowRequest", "FlowResult", "Inconclusive", "Nilpotent", "NotNilpotent",
    "ParseError", "Polynomial", "Reached", "StepUnderflow", "VectorField",
    "ad_iter", "apply_to_poly", "check_closed_form_V2", "check_locally_nilpotent",
    "deserialize", "evaluate", "format_field", "generate_field", "integrate",
    "lie_bracket", "metrics", "parse_field", "serialize", "standard_generators",
    "verify",
]
