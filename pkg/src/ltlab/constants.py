"""Numeric constants for the eigenvalue bounds.

All constants are expressed relative to the semiclassical (phase-space)
constant

    L_cl(gamma, d) = Gamma(gamma+1) / ((4 pi)^{d/2} Gamma(gamma+d/2+1)),

which is a universal lower bound for the sharp constant in the standard
negative-eigenvalue power-sum bound.  Derived constants for complex
potentials (cone sums, corollary sums, single-eigenvalue bounds) multiply
whichever base constant the caller selected via :class:`ConstantMode`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional


class ConstantDomainError(ValueError):
    """Parameter pair (gamma, dim) outside the bound's validity range."""


class SharpUnknownError(ValueError):
    """Sharp constant requested where no sharp value is built in."""


def check_admissible(gamma: float, dim: int) -> None:
    """Validity range of the power-sum bound: gamma >= 1/2 in d=1,
    gamma > 0 in d=2, gamma >= 0 in d >= 3."""
    if dim < 1 or int(dim) != dim:
        raise ConstantDomainError(f"dimension must be a positive integer, got {dim}")
    if gamma < 0:
        raise ConstantDomainError(f"gamma must be nonnegative, got {gamma}")
    if dim == 1 and gamma < 0.5:
        raise ConstantDomainError(
            f"d=1 requires gamma >= 1/2, got gamma={gamma}"
        )
    if dim == 2 and gamma <= 0:
        raise ConstantDomainError(f"d=2 requires gamma > 0, got gamma={gamma}")


@dataclass(frozen=True)
class ConstantMode:
    """How a base power-sum constant is chosen.

    tag is one of 'classical', 'sharp', 'scaled', 'unit'.  'scaled'
    multiplies the classical value by `factor`; the default factor 2.0 is a
    proven upper bound for d=1, gamma >= 1/2, any other factor counts as
    guaranteed only when the caller records a provenance note.  'unit'
    returns exactly 1 and exists to unit-test derived-constant formulas.
    """

    tag: str
    factor: float = 2.0
    provenance: Optional[str] = None

    def __post_init__(self) -> None:
        if self.tag not in ("classical", "sharp", "scaled", "unit"):
            raise ValueError(f"unknown constant mode tag {self.tag!r}")
        if self.tag == "scaled" and not self.factor > 0:
            raise ValueError(f"scale factor must be positive, got {self.factor}")

    @classmethod
    def classical(cls) -> "ConstantMode":
        return cls("classical")

    @classmethod
    def sharp_known(cls) -> "ConstantMode":
        return cls("sharp")

    @classmethod
    def scaled(cls, factor: float = 2.0, provenance: Optional[str] = None) -> "ConstantMode":
        return cls("scaled", factor=factor, provenance=provenance)

    @classmethod
    def unit(cls) -> "ConstantMode":
        return cls("unit")

    @classmethod
    def parse(cls, text: str) -> "ConstantMode":
        """Parse CLI-style mode strings: 'classical', 'sharp', 'unit',
        'scaled', 'scaled:<factor>'."""
        if text.startswith("scaled"):
            _, _, factor = text.partition(":")
            return cls.scaled(float(factor)) if factor else cls.scaled()
        return cls(text)

    def describe(self) -> str:
        if self.tag == "scaled":
            return f"scaled:{self.factor!r}"
        return self.tag


@dataclass(frozen=True)
class ConstantValue:
    """A resolved constant, with provenance.

    guaranteed is True only when the value is a proven upper bound for the
    true constant of the bound it will be used in.
    """

    value: float
    gamma: float
    dim: int
    mode: ConstantMode
    guaranteed: bool

    def __post_init__(self) -> None:
        if not self.value > 0:
            raise ValueError(f"constant must be positive, got {self.value}")

    def scaled_by(self, factor: float) -> "ConstantValue":
        """Derived constant: multiply by a (positive) formula factor,
        inheriting guarantee status."""
        return ConstantValue(
            value=self.value * factor,
            gamma=self.gamma,
            dim=self.dim,
            mode=self.mode,
            guaranteed=self.guaranteed,
        )


def _gamma_half_integer(two_x: int) -> tuple[Fraction, Fraction]:
    """Gamma(two_x / 2) as (rational, power of pi); two_x >= 1."""
    if two_x % 2 == 0:
        return Fraction(math.factorial(two_x // 2 - 1)), Fraction(0)
    n = (two_x - 1) // 2  # Gamma(n + 1/2) = (2n)! / (4^n n!) * sqrt(pi)
    return Fraction(math.factorial(2 * n), 4**n * math.factorial(n)), Fraction(1, 2)


def classical_constant(gamma: float, dim: int) -> float:
    """Semiclassical constant Gamma(gamma+1) / ((4 pi)^{d/2} Gamma(gamma+d/2+1)).

    Half-integer gamma hits gamma-function closed forms; those are evaluated
    in exact rational-times-power-of-pi arithmetic, so e.g. gamma=3/2, d=1
    returns 3/16 exactly.
    """
    check_admissible(gamma, dim)
    two_gamma = 2.0 * gamma
    if two_gamma == int(two_gamma):
        num, pi_num = _gamma_half_integer(int(two_gamma) + 2)
        den, pi_den = _gamma_half_integer(int(two_gamma) + dim + 2)
        rational = num / (den * 2**dim)
        pi_power = pi_num - pi_den - Fraction(dim, 2)
        return float(rational) * math.pi ** float(pi_power) if pi_power else float(rational)
    return math.gamma(gamma + 1.0) / (
        (4.0 * math.pi) ** (dim / 2.0) * math.gamma(gamma + dim / 2.0 + 1.0)
    )


# Sharp one-bound-state constant at the d=1 endpoint gamma = 1/2: the delta
# well -c*delta gives the single eigenvalue -c^2/4, so (-lambda)^{1/2} equals
# exactly half of the potential's L1 norm.
_SHARP_HALF_D1 = 0.5


def _scaled_guaranteed(gamma: float, dim: int, mode: ConstantMode) -> bool:
    if mode.provenance is not None:
        return True
    # Factor 2 covers the sharp constant for d=1, gamma >= 1/2: the sharp/
    # classical ratio is 2 at gamma=1/2 and decreases to 1 by gamma=3/2.
    return mode.factor == 2.0 and dim == 1 and gamma >= 0.5


def lt_constant(gamma: float, dim: int, mode: ConstantMode) -> ConstantValue:
    """Base constant for the full power-sum bound, per mode.

    'sharp' is available only where the sharp value is known: gamma >= 3/2
    (sharp equals classical) and (gamma=1/2, d=1) where it is 1/2.
    """
    check_admissible(gamma, dim)
    cl = classical_constant(gamma, dim)
    if mode.tag == "unit":
        return ConstantValue(1.0, gamma, dim, mode, guaranteed=False)
    if mode.tag == "classical":
        return ConstantValue(cl, gamma, dim, mode, guaranteed=gamma >= 1.5)
    if mode.tag == "scaled":
        return ConstantValue(
            mode.factor * cl, gamma, dim, mode,
            guaranteed=_scaled_guaranteed(gamma, dim, mode),
        )
    # sharp
    if gamma >= 1.5:
        return ConstantValue(cl, gamma, dim, mode, guaranteed=True)
    if dim == 1 and gamma == 0.5:
        return ConstantValue(_SHARP_HALF_D1, gamma, dim, mode, guaranteed=True)
    raise SharpUnknownError(
        f"sharp constant unknown for gamma={gamma}, d={dim}; "
        "known only for gamma >= 3/2 and (gamma=1/2, d=1)"
    )


def one_bound_constant(
    gamma: float,
    dim: int,
    mode: ConstantMode,
    config: Optional[dict] = None,
) -> ConstantValue:
    """Constant in the single-lowest-eigenvalue bound.

    'sharp' is built in only at (gamma=1/2, d=1); the (gamma=0, d>=3)
    counting constant is table data supplied via `config` (see
    :func:`load_constants_file`).  'classical' is never flagged guaranteed:
    the classical value lower-bounds the full-sum constant but has no fixed
    order against the one-bound-state constant.
    """
    check_admissible(gamma, dim)
    cl = classical_constant(gamma, dim)
    if mode.tag == "unit":
        return ConstantValue(1.0, gamma, dim, mode, guaranteed=False)
    if mode.tag == "classical":
        return ConstantValue(cl, gamma, dim, mode, guaranteed=False)
    if mode.tag == "scaled":
        # one-bound-state constant <= full-sum constant, so any factor that
        # dominates the full-sum constant dominates this one too
        return ConstantValue(
            mode.factor * cl, gamma, dim, mode,
            guaranteed=_scaled_guaranteed(gamma, dim, mode),
        )
    # sharp
    if dim == 1 and gamma == 0.5:
        return ConstantValue(_SHARP_HALF_D1, gamma, dim, mode, guaranteed=True)
    if gamma == 0.0 and dim >= 3 and config is not None:
        key = f"clr_d{dim}_gamma0"
        if key in config:
            return ConstantValue(float(config[key]), gamma, dim, mode, guaranteed=True)
    raise SharpUnknownError(
        f"sharp one-bound-state constant not built in for gamma={gamma}, d={dim}"
    )


def cone_constant(
    gamma: float, dim: int, kappa: float, mode: ConstantMode
) -> ConstantValue:
    """Constant 2^{1+gamma/2+d/4} (1 + 2/kappa)^{gamma+d/2} L for the
    outside-cone modulus sum.  Requires gamma >= 1 and kappa > 0."""
    if not kappa > 0:
        raise ConstantDomainError(f"kappa must be positive, got {kappa}")
    if gamma < 1:
        raise ConstantDomainError(f"cone sum requires gamma >= 1, got {gamma}")
    base = lt_constant(gamma, dim, mode)
    factor = 2.0 ** (1.0 + gamma / 2.0 + dim / 4.0) * (1.0 + 2.0 / kappa) ** (
        gamma + dim / 2.0
    )
    return base.scaled_by(factor)


def corollary_constants(
    gamma: float, dim: int, kappa: float, mode: ConstantMode
) -> tuple[ConstantValue, ConstantValue]:
    """(C, Lk): C = 2^{1+gamma/2+d/4} L for the non-positive-real-part
    modulus sum, Lk = (1+kappa) L for the inside-cone sum."""
    if not kappa > 0:
        raise ConstantDomainError(f"kappa must be positive, got {kappa}")
    if gamma < 1:
        raise ConstantDomainError(f"corollary sums require gamma >= 1, got {gamma}")
    base = lt_constant(gamma, dim, mode)
    c = base.scaled_by(2.0 ** (1.0 + gamma / 2.0 + dim / 4.0))
    lk = base.scaled_by(1.0 + kappa)
    return c, lk


def single_ev_constant(
    gamma: float,
    dim: int,
    mode: ConstantMode,
    config: Optional[dict] = None,
) -> ConstantValue:
    """Constant 2^{gamma/2+d/4} L1 for the single-eigenvalue modulus bounds."""
    base = one_bound_constant(gamma, dim, mode, config=config)
    return base.scaled_by(2.0 ** (gamma / 2.0 + dim / 4.0))


def riesz_lift_constant(gamma: float) -> float:
    """Constant C with C * s_-^gamma = int_0^inf t^{gamma-2} (s+t)_- dt,
    which promotes a first-power bound to power gamma > 1.

    Closed form: the integral at s=-1 is the beta integral
    int_0^1 t^{gamma-2} (1-t) dt = 1 / (gamma (gamma-1)).
    """
    if not gamma > 1:
        raise ConstantDomainError(
            f"lifting integral converges only for gamma > 1, got {gamma}"
        )
    return 1.0 / (gamma * (gamma - 1.0))


def load_constants_file(path: str | Path) -> dict:
    """Load the optional constants table: JSON map, e.g.
    {"clr_d3_gamma0": <value>, "scaled_factor_provenance": <note>}."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"constants file {path} must hold a JSON object")
    return data
