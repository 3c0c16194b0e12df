"""Finite fractal topologies, diagonal topologies and iterated sliding means."""

from importlib import resources

from .errors import CapacityError, DomainError, FractopoError, InputError, PreconditionError
from .finite_topology import FiniteTopology, are_homeomorphic, is_topology, parse_topology, subspace_topology
from .diagonal import IndexedFamily, check_diagonal_axioms
from .family import FractalFamilySpec, check_fractal_family, parse_family_spec, sierpinski_doubling
from .signs import lambda_set
from .means import MeanSpec, identification_residual, iterated_mean, translation_residual
from .tree import chart_tuple_labels, chart_tuple_size, enumerate_step

__version__ = "0.1.0"


def fixture_text() -> str:
    """Text of the bundled three-level reference family."""
    return resources.files(__name__).joinpath("data/sierpinski_doubling.fam").read_text()


__all__ = [
    "CapacityError",
    "DomainError",
    "FiniteTopology",
    "FractalFamilySpec",
    "FractopoError",
    "IndexedFamily",
    "InputError",
    "MeanSpec",
    "PreconditionError",
    "are_homeomorphic",
    "chart_tuple_labels",
    "chart_tuple_size",
    "check_diagonal_axioms",
    "check_fractal_family",
    "enumerate_step",
    "fixture_text",
    "identification_residual",
    "is_topology",
    "iterated_mean",
    "lambda_set",
    "parse_family_spec",
    "parse_topology",
    "sierpinski_doubling",
    "subspace_topology",
    "translation_residual",
]
