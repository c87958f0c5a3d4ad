"""Gain tuples and stability-domain parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

from su2track.control.attitude import AttitudeGains
from su2track.errors import InvalidPhi
from su2track.lib.validators import require_keys, require_nonnegative, require_positive


@dataclass(frozen=True)
class TranslationGains:
    k_p: float
    k_v: float
    c_p: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "k_p", require_nonnegative("k_p", self.k_p))
        object.__setattr__(self, "k_v", require_nonnegative("k_v", self.k_v))
        object.__setattr__(self, "c_p", require_nonnegative("c_p", self.c_p))


@dataclass(frozen=True)
class GainSet:
    translation: TranslationGains
    attitude: AttitudeGains

    @property
    def k_p(self) -> float:
        return self.translation.k_p

    @property
    def k_v(self) -> float:
        return self.translation.k_v

    @property
    def c_p(self) -> float:
        return self.translation.c_p

    @property
    def k_X(self) -> float:
        return self.attitude.k_X

    @property
    def k_omega(self) -> float:
        return self.attitude.k_omega

    @property
    def c_a(self) -> float:
        return self.attitude.k_c

    @classmethod
    def from_values(cls, k_p, k_v, c_p, k_X, k_omega, c_a) -> "GainSet":
        return cls(TranslationGains(k_p, k_v, c_p), AttitudeGains(k_X, k_omega, c_a))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "GainSet":
        """Build from ``{k_p, k_v, c_p, k_X, k_omega, c_a}``; ``k_c`` is accepted for ``c_a``."""

        data = dict(data)
        if "c_a" not in data and "k_c" in data:
            data["c_a"] = data["k_c"]
        require_keys(data, ("k_p", "k_v", "c_p", "k_X", "k_omega", "c_a"))
        return cls.from_values(
            data["k_p"], data["k_v"], data["c_p"], data["k_X"], data["k_omega"], data["c_a"]
        )

    def as_dict(self) -> dict[str, float]:
        return {
            "k_p": self.k_p,
            "k_v": self.k_v,
            "c_p": self.c_p,
            "k_X": self.k_X,
            "k_omega": self.k_omega,
            "c_a": self.c_a,
        }


@dataclass(frozen=True)
class DomainParams:
    """``phi`` bounds the attitude error; ``B_f`` the feedforward force; ``B_p`` the initial position error.

    ``phi_attract`` sizes the larger asymptotic-attractivity set.
    """

    phi: float
    B_f: float
    B_p: float
    phi_attract: float = 1.999

    def __post_init__(self) -> None:
        for name in ("phi", "phi_attract"):
            value = float(getattr(self, name))
            if not (0.0 < value < 2.0):
                raise InvalidPhi(f"{name} must lie in (0, 2), got {value!r}")
            object.__setattr__(self, name, value)
        object.__setattr__(self, "B_f", require_positive("B_f", self.B_f))
        object.__setattr__(self, "B_p", require_positive("B_p", self.B_p))

    @property
    def alpha(self) -> float:
        return 2.0 * math.sqrt(2.0 * self.phi)


__all__ = ["TranslationGains", "GainSet", "DomainParams"]
