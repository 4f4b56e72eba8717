# types/schemes.py

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence, Tuple

from ..errors import SchemeError
from .common import ManifoldKind, SchemeKind

if TYPE_CHECKING:
    from ..curves.curve import Curve
    from ..geometry.base import Manifold


@dataclass(frozen=True)
class Scheme:
    """Base class for the renormalization schemes of Phi(E)"""

    @property
    def kind(self) -> SchemeKind:
        raise NotImplementedError

    def validate(self, manifold: "Manifold", n_curves: int) -> None:
        pass

    def seed_energy(self) -> float:
        """Energy at which the downward bracket search starts"""
        return -1.0


@dataclass(frozen=True)
class BoundState3D(Scheme):
    """On-shell scheme: 1/lambda_R = 0 at mu = nu_i for every curve"""
    nu: Tuple[float, ...]

    @property
    def kind(self) -> SchemeKind:
        return SchemeKind.BOUND_STATE_3D

    def validate(self, manifold: "Manifold", n_curves: int) -> None:
        if manifold.dimension != 3:
            raise SchemeError(f"BoundState3D requires a 3-dimensional manifold, got {manifold.kind.value}")
        if len(self.nu) != n_curves:
            raise SchemeError(f"expected {n_curves} binding wavenumbers, got {len(self.nu)}")
        for i, nu in enumerate(self.nu):
            if not nu > 0:
                raise SchemeError(f"binding wavenumber nu[{i}] must be positive, got {nu}")

    @property
    def threshold(self) -> float:
        return -max(self.nu) ** 2

    def seed_energy(self) -> float:
        return self.threshold


@dataclass(frozen=True)
class Finite2D(Scheme):
    """Planar theory with finite bare couplings lambda_i"""
    couplings: Tuple[float, ...]

    @property
    def kind(self) -> SchemeKind:
        return SchemeKind.FINITE_2D

    def validate(self, manifold: "Manifold", n_curves: int) -> None:
        if manifold.kind is not ManifoldKind.EUCLIDEAN_PLANE:
            raise SchemeError(f"Finite2D requires EuclideanPlane, got {manifold.kind.value}")
        if len(self.couplings) != n_curves:
            raise SchemeError(f"expected {n_curves} couplings, got {len(self.couplings)}")
        for i, coupling in enumerate(self.couplings):
            if not coupling > 0:
                raise SchemeError(f"coupling lambda[{i}] must be positive, got {coupling}")


@dataclass(frozen=True)
class RGSubtracted(Scheme):
    """Subtraction of the factorized circle counterterm at scale mu"""
    inverse_coupling: float
    mu: float

    @classmethod
    def from_coupling(cls, lambda_R: float, mu: float) -> "RGSubtracted":
        if lambda_R == 0:
            raise SchemeError("lambda_R = 0 has no finite inverse coupling")
        return cls(inverse_coupling=1.0 / lambda_R, mu=mu)

    @property
    def kind(self) -> SchemeKind:
        return SchemeKind.RG_SUBTRACTED

    @property
    def lambda_R(self) -> float:
        return math.inf if self.inverse_coupling == 0 else 1.0 / self.inverse_coupling

    def validate(self, manifold: "Manifold", n_curves: int) -> None:
        if manifold.kind is not ManifoldKind.EUCLIDEAN_SPACE3:
            raise SchemeError(f"RGSubtracted requires EuclideanSpace3, got {manifold.kind.value}")
        if n_curves != 1:
            raise SchemeError(f"RGSubtracted works with a single curve, got {n_curves}")
        if not self.mu > 0:
            raise SchemeError(f"mu must be positive, got {self.mu}")
        if not math.isfinite(self.inverse_coupling):
            raise SchemeError(f"1/lambda_R must be finite, got {self.inverse_coupling}")


@dataclass(frozen=True)
class Regularized(Scheme):
    """Heat-kernel time cutoff eps with bare inverse couplings 1/lambda_i(eps)"""
    eps: float
    inverse_couplings: Tuple[float, ...]

    @classmethod
    def from_prescription(
        cls,
        curves: Sequence["Curve"],
        eps: float,
        inverse_lambda_R: float,
        mu: float,
    ) -> "Regularized":
        """Bare couplings that renormalize to 1/lambda_R at scale mu"""
        from ..operator.principal import bare_inverse_coupling

        return cls(
            eps=eps,
            inverse_couplings=tuple(
                bare_inverse_coupling(curve, eps, inverse_lambda_R, mu) for curve in curves
            ),
        )

    @property
    def kind(self) -> SchemeKind:
        return SchemeKind.REGULARIZED

    def validate(self, manifold: "Manifold", n_curves: int) -> None:
        if not self.eps > 0:
            raise SchemeError(f"cutoff eps must be positive, got {self.eps}")
        if len(self.inverse_couplings) != n_curves:
            raise SchemeError(
                f"expected {n_curves} bare couplings, got {len(self.inverse_couplings)}"
            )
