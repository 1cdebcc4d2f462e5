"""Evaluated tensors at a point."""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from curvlab.exceptions import InvalidArgumentError


class Variance(str, Enum):
    """Index position of a tensor slot."""

    UPPER = "upper"
    LOWER = "lower"


UP = Variance.UPPER
DOWN = Variance.LOWER


@dataclass(frozen=True)
class TensorValue:
    """Dense component array with per-slot variance."""

    dim: int
    variance: tuple[Variance, ...]
    components: np.ndarray
    symmetries: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        expected = (self.dim,) * len(self.variance)
        if self.components.shape != expected:
            raise InvalidArgumentError(
                f"components of shape {self.components.shape} do not match rank "
                f"{len(self.variance)} in dimension {self.dim}"
            )

    @property
    def rank(self) -> int:
        return len(self.variance)

    def norm(self) -> float:
        """Frobenius norm of the components."""
        return float(np.linalg.norm(self.components.ravel()))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components))) if self.components.size else 0.0


def tensor(
    components: np.ndarray, *variance: Variance, symmetries: tuple[str, ...] = ()
) -> TensorValue:
    """Wrap an array, inferring the dimension from its first axis."""
    array = np.asarray(components, dtype=float)
    dim = array.shape[0] if array.ndim else 0
    return TensorValue(dim, tuple(variance), array, symmetries)


def _move_slot(
    t: TensorValue, slot: int, matrix: np.ndarray, target: Variance
) -> TensorValue:
    if not 0 <= slot < t.rank:
        raise InvalidArgumentError(
            f"slot {slot} out of range for a rank-{t.rank} tensor"
        )
    if t.variance[slot] is target:
        raise InvalidArgumentError(f"slot {slot} is already {target.value}")
    letters = string.ascii_lowercase[: t.rank]
    replaced = letters[:slot] + "z" + letters[slot + 1 :]
    components = np.einsum(
        f"z{letters[slot]},{letters}->{replaced}", matrix, t.components
    )
    variance = t.variance[:slot] + (target,) + t.variance[slot + 1 :]
    return TensorValue(t.dim, variance, components)


def raise_index(t: TensorValue, slot: int, g: np.ndarray) -> TensorValue:
    """Contract a lower slot with the inverse metric.

    Args:
        t: Tensor with a lower index at ``slot``
        slot: Slot to raise
        g: Metric components at the point

    Returns:
        TensorValue: Tensor with ``slot`` upper

    Raises:
        InvalidArgumentError: If the slot is out of range or already upper
    """
    return _move_slot(t, slot, np.linalg.inv(g), Variance.UPPER)


def lower_index(t: TensorValue, slot: int, g: np.ndarray) -> TensorValue:
    """Contract an upper slot with the metric."""
    return _move_slot(t, slot, np.asarray(g), Variance.LOWER)


def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Kulkarni-Nomizu product in the (0,4) storage used by the engine.

    ``(h o k)_abcd = h_ac k_bd + h_bd k_ac - h_ad k_bc - h_bc k_ad``; for the
    unit sphere ``R = (g o g) / 2``.
    """
    return (
        np.einsum("ac,bd->abcd", h, k)
        + np.einsum("bd,ac->abcd", h, k)
        - np.einsum("ad,bc->abcd", h, k)
        - np.einsum("bc,ad->abcd", h, k)
    )
