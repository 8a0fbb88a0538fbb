"""Design formulas for the ordered-antiferromagnet NMR register.

Resonance frequencies, ordering temperatures, the spin-wave thermal
fluctuation P(T), sublattice magnetization, the spin-wave T2 estimate and
nuclear polarization. All energies are in joules, fields in tesla,
temperatures in kelvin and frequencies in hertz.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from importlib import resources
from typing import Optional

import scipy.constants as sc
from scipy import integrate, special

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "MaterialParams",
    "SpinWaveModel",
    "UnknownMaterialError",
    "MissingParameter",
    "QuadratureError",
    "OrderedPhaseViolation",
    "load_materials",
    "material",
    "resonance_frequency",
    "b_min",
    "critical_temperatures",
    "thermal_fluctuation_P",
    "sublattice_magnetization",
    "t2_decoherence",
    "polarization_check",
]


class UnknownMaterialError(LookupError):
    pass


class MissingParameter(ValueError):
    """A formula needs a material constant the preset does not carry."""


class QuadratureError(ArithmeticError):
    pass


class OrderedPhaseViolation(ValueError):
    """P(T) + psi >= 1: the sublattice is no longer ordered."""


@dataclass(frozen=True)
class PhysicalConstants:
    mu_N: float = 5.05e-27
    mu_B: float = sc.physical_constants["Bohr magneton"][0]
    k: float = sc.k
    hbar: float = sc.hbar

    @property
    def h(self) -> float:
        return 2 * math.pi * self.hbar


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class MaterialParams:
    name: str
    g_N: Optional[float]
    A: Optional[float] = None
    I_n: Optional[float] = None
    J_ex: Optional[float] = None
    J_A: Optional[float] = None
    a: Optional[float] = None
    d: int = 1
    Z: Optional[float] = None
    S: Optional[float] = None
    T_NS: Optional[float] = None
    nucleus: str = ""
    nuclei: dict = field(default_factory=dict, compare=False)
    description: str = ""

    def __post_init__(self):
        for key in ("g_N", "A", "J_ex"):
            v = getattr(self, key)
            if v is not None and not v > 0:
                raise ValueError(f"{key} must be positive, got {v}")
        if self.J_A is not None:
            if self.J_A < 0:
                raise ValueError("J_A must be >= 0")
            if self.J_ex is not None and not self.J_ex > self.J_A:
                raise ValueError("easy-axis order needs J_ex > J_A")
        if self.d not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.d}")

    def need(self, key: str) -> float:
        value = getattr(self, key)
        if value is None:
            raise MissingParameter(f"material {self.name!r} has no value for {key}")
        return value

    @property
    def indirect_coupling(self) -> float:
        """I_n, or the estimate A^2/J_ex when not given."""
        if self.I_n is not None:
            return self.I_n
        return self.need("A") ** 2 / self.need("J_ex")

    def with_(self, **changes) -> "MaterialParams":
        return replace(self, **changes)


def load_materials(constants: PhysicalConstants = CONSTANTS) -> dict[str, MaterialParams]:
    """Presets from the bundled data file.

    Where only an ordering temperature is known, J_ex is set to k*T_NS.
    """
    text = resources.files("afmqc.data").joinpath("materials.json").read_text(encoding="utf-8")
    out = {}
    for name, rec in json.loads(text).items():
        if rec.get("J_ex") is None and rec.get("T_NS") is not None:
            rec = dict(rec, J_ex=constants.k * rec["T_NS"])
        out[name] = MaterialParams(name=name, **rec)
    return out


def material(name: str) -> MaterialParams:
    presets = load_materials()
    for key, value in presets.items():
        if key.lower() == name.lower():
            return value
    raise UnknownMaterialError(f"unknown material {name!r}; known: {', '.join(presets)}")


# -- resonance -----------------------------------------------------------------

def resonance_frequency(
    mat: MaterialParams,
    field_tesla: float,
    sublattice,
    m,
    constants: PhysicalConstants = CONSTANTS,
) -> float:
    """|g_N mu_N B +- A/2 - I_n m| / h, plus sign for A (and dopant) sites."""
    if field_tesla < 0:
        raise ValueError("field must be >= 0")
    sub = str(getattr(sublattice, "value", sublattice)).upper()
    if sub not in ("A", "B", "D"):
        raise ValueError(f"unknown sublattice {sublattice!r}")
    sign = -1.0 if sub == "B" else 1.0
    zeeman = mat.need("g_N") * constants.mu_N * field_tesla
    energy = zeeman + sign * mat.need("A") / 2 - mat.indirect_coupling * float(Fraction(m))
    return abs(energy) / constants.h


def b_min(mat: MaterialParams, constants: PhysicalConstants = CONSTANTS) -> float:
    """Field above which both sublattices keep the same Zeeman ordering."""
    return mat.need("A") / (2 * mat.need("g_N") * constants.mu_N)


def critical_temperatures(
    mat: MaterialParams, constants: PhysicalConstants = CONSTANTS
) -> tuple[float, float]:
    """(T_NS, T_NI) = (J/k, A^2/(J k))."""
    j = mat.need("J_ex")
    t_ns = j / constants.k
    t_ni = mat.need("A") ** 2 / (j * constants.k) if mat.A is not None else None
    return t_ns, t_ni


# -- spin waves ----------------------------------------------------------------

# surface of the unit sphere in d dimensions (d = 1 counts both directions)
_SPHERE = {1: 2.0, 2: 2 * math.pi, 3: 4 * math.pi}


@dataclass(frozen=True)
class SpinWaveModel:
    """Easy-axis spin-wave spectrum eps(k) = sqrt(eps0^2 + (J a k)^2).

    ``epsilon0`` defaults to Z * sqrt(J_ex * J_A). ``d`` and ``J`` come from
    the material unless overridden. Momenta are integrated in units of 1/a
    over |q| <= pi, so P(T) is a fluctuation per lattice site and the
    lattice period drops out.
    """

    material: MaterialParams
    epsilon0: Optional[float] = None
    psi: float = 0.0
    d: Optional[int] = None
    J: Optional[float] = None
    reference_ratio: float = 20.0  # asymptotic constant fitted at kT = eps0 / ratio
    constants: PhysicalConstants = CONSTANTS

    def __post_init__(self):
        if self.epsilon0 is None:
            m = self.material
            eps = m.need("Z") * math.sqrt(m.need("J_ex") * m.need("J_A"))
            object.__setattr__(self, "epsilon0", eps)
        if not self.epsilon0 > 0:
            raise ValueError("epsilon0 must be positive")
        if self.d is None:
            object.__setattr__(self, "d", self.material.d)
        if self.d not in _SPHERE:
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.d}")
        if self.J is None:
            object.__setattr__(self, "J", self.material.need("J_ex"))

    @property
    def easy_axis(self) -> bool:
        return self.psi == 0

    def energy(self, q: float) -> float:
        return math.hypot(self.epsilon0, self.J * q)

    def kT(self, T: float) -> float:
        if not T > 0:
            raise ValueError("temperature must be positive")
        return self.constants.k * T

    def temperature_for(self, kT: float) -> float:
        return kT / self.constants.k

    def P_integral(self, T: float, epsrel: float = 1e-6) -> float:
        kT = self.kT(T)
        d = self.d

        def integrand(q: float) -> float:
            x = self.energy(q) / kT
            occupation = math.exp(-x) / -math.expm1(-x)
            return q ** (d - 1) * occupation

        # thermal momentum scale; splitting there helps quad see the peak
        q_th = min(math.sqrt(2 * self.epsilon0 * kT) / self.J, math.pi / 2)
        value, err = integrate.quad(
            integrand, 0.0, math.pi, points=[q_th], epsrel=epsrel, epsabs=0.0, limit=200
        )
        if not math.isfinite(value) or err > max(10 * epsrel * abs(value), 1e-300):
            raise QuadratureError(f"quadrature did not converge at T={T}: value {value}, error {err}")
        return _SPHERE[d] * value / (2 * math.pi) ** d

    def asymptotic_shape(self, T: float) -> float:
        """(kT eps0 / J^2)^(d/2) exp(-eps0 / kT), without the constant."""
        kT = self.kT(T)
        return (kT * self.epsilon0 / self.J ** 2) ** (self.d / 2) * math.exp(-self.epsilon0 / kT)

    @cached_property
    def fitted_constant(self) -> float:
        T_ref = self.temperature_for(self.epsilon0 / self.reference_ratio)
        return self.P_integral(T_ref) / self.asymptotic_shape(T_ref)

    @property
    def gaussian_constant(self) -> float:
        """Leading-order constant from expanding eps(q) about q = 0."""
        d = self.d
        return _SPHERE[d] * special.gamma(d / 2) * 2 ** (d / 2 - 1) / (2 * math.pi) ** d

    def P_asymptotic(self, T: float) -> float:
        return self.fitted_constant * self.asymptotic_shape(T)


def thermal_fluctuation_P(model: SpinWaveModel, T: float, method: str = "integral") -> float:
    if method == "integral":
        return model.P_integral(T)
    if method == "asymptotic":
        return model.P_asymptotic(T)
    raise ValueError(f"unknown method {method!r}")


def sublattice_magnetization(model: SpinWaveModel, T: float, N: float, method: str = "integral") -> float:
    """mu_B N (1 - P(T) - psi), in J/T."""
    p = thermal_fluctuation_P(model, T, method)
    if p + model.psi >= 1:
        raise OrderedPhaseViolation(f"P + psi = {p + model.psi:.3g} at T = {T} K")
    return model.constants.mu_B * N * (1 - p - model.psi)


@dataclass(frozen=True)
class T2Estimate:
    rate: float
    T2: Optional[float]


def t2_decoherence(model: SpinWaveModel, T: float) -> T2Estimate:
    """Spin-wave Raman rate (A^2/J)(kT/J)^3 (eps0/kT) exp(-eps0/kT) / (pi^2 hbar).

    Order of magnitude only. ``T2`` is None when the rate underflows to 0.
    """
    kT = model.kT(T)
    J = model.J
    A = model.material.need("A")
    eps0 = model.epsilon0
    rate = (A ** 2 / J) * (kT / J) ** 3 * (eps0 / kT) * math.exp(-eps0 / kT)
    rate /= math.pi ** 2 * model.constants.hbar
    return T2Estimate(rate, 1 / rate if rate > 0 else None)


@dataclass(frozen=True)
class Polarization:
    ratio: float
    excited_fraction: float

    @property
    def strongly_polarized(self) -> bool:
        return self.ratio >= 1


def polarization_check(
    mat: MaterialParams,
    field_tesla: float,
    T: float,
    sublattice="A",
    m=0,
    constants: PhysicalConstants = CONSTANTS,
) -> Polarization:
    """h nu / kT and the thermal excited-state population of one nucleus."""
    if not T > 0:
        raise ValueError("temperature must be positive")
    nu = resonance_frequency(mat, field_tesla, sublattice, m, constants)
    ratio = constants.h * nu / (constants.k * T)
    return Polarization(ratio, float(special.expit(-ratio)))
