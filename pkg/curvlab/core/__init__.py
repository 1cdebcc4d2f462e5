"""Numeric substrate: expressions, jets, tensors and metric evaluation."""

from curvlab.core.expression import ScalarExpr, to_text
from curvlab.core.jets import Jet, JetArray, eval_jet, jet_algebra, jet_einsum
from curvlab.core.metric import (
    DomainBox,
    Interval,
    MetricField,
    Point,
    inverse_metric_jets,
    metric_jets,
    metric_value,
)
from curvlab.core.parser import parse_expr
from curvlab.core.tensors import (
    DOWN,
    UP,
    TensorValue,
    Variance,
    lower_index,
    raise_index,
    tensor,
)

__all__ = [
    "ScalarExpr",
    "to_text",
    "parse_expr",
    "Jet",
    "JetArray",
    "eval_jet",
    "jet_algebra",
    "jet_einsum",
    "Point",
    "Interval",
    "DomainBox",
    "MetricField",
    "metric_jets",
    "inverse_metric_jets",
    "metric_value",
    "TensorValue",
    "Variance",
    "UP",
    "DOWN",
    "tensor",
    "raise_index",
    "lower_index",
]
