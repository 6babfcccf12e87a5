"""Compression estimators for two-layer networks."""

import json

from ._core import (
    Activation,
    DecodeError,
    DimensionError,
    DomainError,
    HypoParams,
    Hypothesis,
    NetworkCompressor,
    NetworkRealization,
    RefusalError,
    Rng,
    SampleSet,
    SketchConfig,
    Sketcher,
    SketchSample,
    decode_gamma,
    encode_gamma,
    encode_signed_gamma,
    gamma_length,
    gen_bound,
    signed_gamma_length,
    sketch_decode,
    unzigzag,
    zigzag,
)
from . import _core

__all__ = [
    "Activation",
    "DecodeError",
    "DimensionError",
    "DomainError",
    "HypoParams",
    "Hypothesis",
    "NetworkCompressor",
    "NetworkRealization",
    "RefusalError",
    "Rng",
    "SampleSet",
    "SketchConfig",
    "Sketcher",
    "SketchSample",
    "adl_bound",
    "concentration",
    "decode_gamma",
    "encode_gamma",
    "encode_signed_gamma",
    "gamma_length",
    "gen_bound",
    "run_cli",
    "shatter",
    "signed_gamma_length",
    "sketch_decode",
    "unzigzag",
    "zigzag",
]


def adl_bound(params, m, sigma0=0.0):
    """Bit accounting of one unit-estimator realization, as a dict."""
    return json.loads(_core.adl_bound_json(params, m, sigma0))


def concentration(d, h, trials, seed):
    """Empirical tail frequencies against their bounds, as a dict."""
    return json.loads(_core.concentration_json(d, h, trials, seed))


def shatter(d, h, seed):
    """Build and verify a shattering instance; returns report and bundle."""
    return json.loads(_core.shatter_json(d, h, seed))


def run_cli(*args):
    """Run the adl command line tool in-process; returns its exit code."""
    return _core.run_cli([str(a) for a in args])
