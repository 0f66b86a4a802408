"""JSON scenario documents: parsing, validation and record construction.

A minimal document::

    {"profile": {"kind": "flat"}, "r0": 1.0, "T": 2.0}

Everything else has a default. ``initial_surface`` is either
``{"type": "round"}`` or
``{"type": "perturbation", "legendre_mode": 2, "amplitude": 0.1}``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field

from .ambient import WarpedProfile
from .chain import CASES, MODES, _CASE_PROFILE
from .errors import (FlowBreakdown, NonGraphical, ParseError, RadiusOutOfDomain,
                     ValidationError)
from .flow import exact_round_flow, perturbed_sphere, run_imcf
from .masses import VARIANTS
from .surface import AxisymGrid

PROFILE_KINDS = ("flat", "schwarzschild", "hyperbolic", "adss", "custom")
BOUND_KEYS = ("H0", "H1", "A1", "D", "C")


@dataclass
class Scenario:
    profile: dict
    r0: float
    T: float
    N_theta: int = 64
    N_t: int = 256
    initial_surface: dict = field(default_factory=lambda: {"type": "round"})
    case: str = "pmt-flat"
    m: float = 0.0
    mass_variant: str = "euclidean"
    bounds: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    derivative_mode: str = "delta-covariant"
    g3_base_slice: str = "T"
    warnings: list = field(default_factory=list, compare=False)

    def refined(self, k):
        """Copy with ``N_theta`` and ``N_t`` both multiplied by ``2**k``."""
        d = asdict(self)
        d["N_theta"] *= 2**k
        d["N_t"] *= 2**k
        return Scenario(**d)

    def build_profile(self) -> WarpedProfile:
        p = self.profile
        if p["kind"] == "custom":
            return WarpedProfile.from_csv(p["table"])
        return WarpedProfile.from_kind(p["kind"], p.get("m", 0.0))

    def build_record(self):
        """Exact flow for round starts, the PDE solver otherwise."""
        profile = self.build_profile()
        try:
            if self.initial_surface["type"] == "round":
                return exact_round_flow(profile, self.r0, self.T, self.N_t, self.N_theta)
            grid = AxisymGrid(self.N_theta)
            rho0 = perturbed_sphere(grid, self.r0, self.initial_surface["legendre_mode"],
                                    self.initial_surface["amplitude"])
            return run_imcf(profile, rho0, self.T, self.N_t)
        except (RadiusOutOfDomain, NonGraphical) as exc:
            raise FlowBreakdown(str(exc)) from exc


def _require(cond, name, msg):
    if not cond:
        raise ValidationError(name, f"{name}: {msg}")


def _number(d, key, default=None, kind=float):
    v = d.get(key, default)
    if v is None:
        raise ValidationError(key, f"{key}: required")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(key, f"{key}: expected a number, got {v!r}")
    if kind is int:
        _require(float(v).is_integer(), key, "expected an integer")
        return int(v)
    return float(v)


def scenario_from_dict(doc) -> Scenario:
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be a JSON object")
    known = set(Scenario.__dataclass_fields__) - {"warnings"}
    extra = set(doc) - known
    _require(not extra, sorted(extra)[0] if extra else "", "unknown field")

    prof = doc.get("profile")
    _require(isinstance(prof, dict) and prof.get("kind") in PROFILE_KINDS, "profile",
             f"expected {{'kind': one of {PROFILE_KINDS}}}")
    prof = dict(prof)
    prof["m"] = _number(prof, "m", 0.0)
    if prof["kind"] in ("schwarzschild", "adss"):
        _require(prof["m"] > 0, "profile.m", "mass must be positive")
    if prof["kind"] == "custom":
        _require(isinstance(prof.get("table"), str), "profile.table", "path to an r,V CSV")

    s = Scenario(profile=prof, r0=_number(doc, "r0"), T=_number(doc, "T"),
                 N_theta=_number(doc, "N_theta", 64, int), N_t=_number(doc, "N_t", 256, int),
                 case=doc.get("case", "pmt-flat"), m=_number(doc, "m", 0.0),
                 mass_variant=doc.get("mass_variant", "euclidean"),
                 bounds=dict(doc.get("bounds", {})), tolerances=dict(doc.get("tolerances", {})),
                 derivative_mode=doc.get("derivative_mode", "delta-covariant"),
                 g3_base_slice=str(doc.get("g3_base_slice", "T")))
    _require(s.N_theta >= 16, "N_theta", "must be >= 16")
    _require(s.N_t >= 32, "N_t", "must be >= 32")
    _require(s.T > 0, "T", "must be positive")
    _require(s.r0 > 0, "r0", "must be positive")
    _require(s.case in CASES, "case", f"one of {CASES}")
    _require(s.mass_variant in VARIANTS, "mass_variant", f"one of {VARIANTS}")
    _require(s.derivative_mode in MODES, "derivative_mode", f"one of {MODES}")
    _require(s.g3_base_slice in ("T", "zero"), "g3_base_slice", "T or zero")
    _require(set(s.bounds) <= set(BOUND_KEYS), "bounds", f"keys among {BOUND_KEYS}")
    for k, v in s.bounds.items():
        _number(s.bounds, k)

    init = doc.get("initial_surface", {"type": "round"})
    _require(isinstance(init, dict) and init.get("type") in ("round", "perturbation"),
             "initial_surface", "type must be round or perturbation")
    init = dict(init)
    if init["type"] == "perturbation":
        init["legendre_mode"] = _number(init, "legendre_mode", kind=int)
        init["amplitude"] = _number(init, "amplitude")
        _require(init["legendre_mode"] >= 1, "initial_surface.legendre_mode", "must be >= 1")
        _require(abs(init["amplitude"]) < 0.5, "initial_surface.amplitude", "|eps| must be < 0.5")
    s.initial_surface = init

    expected = _CASE_PROFILE[s.case]
    if prof["kind"] != expected:
        msg = f"case {s.case} expects a {expected} profile, got {prof['kind']}"
        s.warnings.append(msg)
        warnings.warn(msg, stacklevel=2)
    return s


def parse_scenario(text) -> Scenario:
    """Parse and validate a scenario JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(doc)


def emit(s: Scenario) -> str:
    d = asdict(s)
    d.pop("warnings")
    return json.dumps(d, indent=2, sort_keys=True) + "\n"


def bounds_or_inf(s: Scenario):
    b = {k: math.inf for k in BOUND_KEYS}
    b["H0"] = 0.0
    b.update(s.bounds)
    return b


def parse_family(text):
    """Family document ``{"base": {...}, "parameter": "m"|"amplitude", "values": [...]}``.

    ``m`` sets the profile mass, ``amplitude`` the perturbation amplitude.
    Returns ``(values, scenarios)``.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict) or not {"base", "parameter", "values"} <= set(doc):
        raise ParseError("family document needs base, parameter and values")
    param = doc["parameter"]
    _require(param in ("m", "amplitude"), "parameter", "m or amplitude")
    values = doc["values"]
    _require(isinstance(values, list) and values, "values", "non-empty list of numbers")
    scenarios = []
    for v in values:
        base = json.loads(json.dumps(doc["base"]))
        if param == "m":
            base.setdefault("profile", {})["m"] = v
        else:
            base["initial_surface"] = dict(base.get("initial_surface", {}),
                                           type="perturbation", amplitude=v)
            base["initial_surface"].setdefault("legendre_mode", 2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            scenarios.append(scenario_from_dict(base))
    return [float(v) for v in values], scenarios
