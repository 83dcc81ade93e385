"""Polytope valuations built from kernels on flag spaces."""

import json

from ._valab import (
    Kernel,
    NumericalError,
    Polytope,
    ValidationError,
    __version__,
    constant_kernel,
    hausdorff_distance,
    klain_function,
    separable_kernel,
    smap,
)
from . import _valab

__all__ = [
    "Kernel",
    "NumericalError",
    "Polytope",
    "ValidationError",
    "__version__",
    "constant_kernel",
    "cosine_multipliers",
    "faces",
    "hausdorff_distance",
    "kernel",
    "klain_function",
    "phi",
    "polytope",
    "probe",
    "range_diagnostic",
    "separable_kernel",
    "smap",
]


def kernel(spec):
    """Kernel from a spec dict, e.g. {"kind": "lemma18"}."""
    return _valab.kernel_from_json(json.dumps(spec))


def polytope(spec):
    """Polytope from a spec dict, e.g. {"preset": "cube", "dim": 3}."""
    return _valab.Polytope.from_json(json.dumps(spec))


def phi(kernel, polytope, method="auto", samples=100000, seed=0):
    """Valuation report as a dict with value, error_estimate and per-face terms."""
    return json.loads(_valab.phi(kernel, polytope, method, samples, seed))


def faces(polytope, k, method="auto", samples=100000, seed=0):
    return json.loads(_valab.faces(polytope, k, method, samples, seed))


def probe(kernel, sequence, members=(), reference=None, extrapolation="richardson"):
    ref = json.dumps(reference) if reference is not None else ""
    return json.loads(_valab.probe(kernel, json.dumps(sequence), list(members), ref, extrapolation))


def cosine_multipliers(max_degree=8):
    return json.loads(_valab.cosine_multipliers(max_degree))


def range_diagnostic(kernel, max_degree=8):
    return json.loads(_valab.range_diagnostic(kernel, max_degree))
