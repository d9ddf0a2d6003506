"""Scenario files and CSV output.

A scenario is an INI-style text file with sections [motion], [material],
[grid], [mode] and an optional [tolerances]:

    [motion]
    preset = boosted_stretch     ; rigid_boost | uniform_stretch | boosted_stretch
    rate = 0.05                  ; presets declare which keys they need
    v0 = 0.55

    [material]
    m0 = 1.0                     ; rest particle density
    c1 = 1.0                     ; free-energy stiffness
    t0 = 2.0                     ; initial flow stress
    H = 1.0                      ; hardening slope
    weights = metric-signature   ; effective-stress weight preset (optional)

    [grid]
    L0 = 1.0
    X_count = 2
    t_start = 0.0
    t_end = 2.0
    dt = 0.001

    [mode]
    mode = relativistic          ; or nonrelativistic
    c = 1.0                      ; optional, defaults to 1

    [tolerances]                 ; optional overrides
    tol_newton = 1e-12
    tol_consistency = 1e-10
    beta_max = 0.999999999
"""

from __future__ import annotations

import configparser
from pathlib import Path

import numpy as np

from .constitutive import WEIGHT_PRESETS, MaterialParams
from .worldline import MOTION_PRESETS, BarScenario, TimeSeriesRecord

CSV_COLUMNS = ("t", "X", "beta", "C_hat", "j", "L", "L_prime", "T",
               "lambda_e", "lambda_p", "Gamma_p", "sigma_bar", "t_y", "xi", "loading")
CSV_HEADER = ",".join(CSV_COLUMNS)


class ParseError(ValueError):
    """Scenario file is not well-formed INI text."""


class ValidationError(ValueError):
    """Scenario file parsed but a value violates its constraint."""


def _get_float(section, key: str, section_name: str, default: float | None = None) -> float:
    if key not in section:
        if default is not None:
            return default
        raise ValidationError(f"missing key '{key}' in [{section_name}]")
    try:
        return float(section[key])
    except ValueError as exc:
        raise ValidationError(f"key '{key}' in [{section_name}] is not a number: "
                              f"{section[key]!r}") from exc


def _max_abs_beta(scenario: BarScenario) -> float:
    """Largest |beta| reached on the (X, t) grid.

    All presets give each particle a constant velocity, so the extremes of the
    label grid at the time endpoints bound the whole run; a sweep over the
    grid corners is still performed for safety.
    """
    worst = 0.0
    for X in scenario.labels:
        for t in (scenario.t_start, scenario.t_end):
            worst = max(worst, abs(scenario.motion.velocity(float(X), float(t))) / scenario.c)
    return worst


def load_scenario(path) -> BarScenario:
    """Parse and validate a scenario file into a runnable BarScenario."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"scenario file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cp.read_file(fh)
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ParseError(f"malformed scenario file {path}: {exc}") from exc

    for name in ("motion", "material", "grid", "mode"):
        if not cp.has_section(name):
            raise ValidationError(f"missing section [{name}]")

    mode_sec = cp["mode"]
    mode = mode_sec.get("mode", "relativistic").strip()
    if mode not in ("relativistic", "nonrelativistic"):
        raise ValidationError(f"key 'mode' must be relativistic or nonrelativistic, got {mode!r}")
    c = _get_float(mode_sec, "c", "mode", default=1.0)
    if c <= 0.0:
        raise ValidationError("key 'c' in [mode] must be positive")

    motion_sec = cp["motion"]
    preset_name = motion_sec.get("preset", "").strip()
    if preset_name not in MOTION_PRESETS:
        raise ValidationError(f"unknown motion preset {preset_name!r}; "
                              f"choose from {sorted(MOTION_PRESETS)}")
    factory, param_names = MOTION_PRESETS[preset_name]
    kwargs = {k: _get_float(motion_sec, k, "motion") for k in param_names}
    motion = factory(c=c, **kwargs)

    mat_sec = cp["material"]
    weights_name = mat_sec.get("weights", "metric-signature").strip()
    if weights_name not in WEIGHT_PRESETS:
        raise ValidationError(f"unknown weights preset {weights_name!r}; "
                              f"choose from {sorted(WEIGHT_PRESETS)}")
    weights = WEIGHT_PRESETS[weights_name](2)

    tol_sec = cp["tolerances"] if cp.has_section("tolerances") else {}
    tol_newton = _get_float(tol_sec, "tol_newton", "tolerances", default=1e-12)
    tol_consistency = _get_float(tol_sec, "tol_consistency", "tolerances", default=1e-10)
    beta_max = _get_float(tol_sec, "beta_max", "tolerances", default=1.0 - 1e-9)

    try:
        material = MaterialParams(
            rest_density=_get_float(mat_sec, "m0", "material"),
            stiffness=_get_float(mat_sec, "c1", "material"),
            yield_stress=_get_float(mat_sec, "t0", "material"),
            hardening=_get_float(mat_sec, "H", "material"),
            yield_weights=weights,
            beta_max=beta_max,
            tol_newton=tol_newton,
            tol_consistency=tol_consistency,
        )
    except ValueError as exc:
        raise ValidationError(f"[material]: {exc}") from exc

    grid_sec = cp["grid"]
    try:
        x_count = int(grid_sec.get("X_count", "1"))
    except ValueError as exc:
        raise ValidationError(f"key 'X_count' in [grid] is not an integer") from exc
    try:
        scenario = BarScenario(
            motion=motion,
            material=material,
            L0=_get_float(grid_sec, "L0", "grid"),
            X_count=x_count,
            t_start=_get_float(grid_sec, "t_start", "grid", default=0.0),
            t_end=_get_float(grid_sec, "t_end", "grid"),
            dt=_get_float(grid_sec, "dt", "grid"),
            mode=mode,
            c=c,
        )
    except ValueError as exc:
        raise ValidationError(f"[grid]: {exc}") from exc

    worst_beta = _max_abs_beta(scenario)
    if worst_beta > material.beta_max:
        raise ValidationError(f"motion reaches |beta| = {worst_beta}, beyond "
                              f"beta_max = {material.beta_max}")
    if preset_name in ("uniform_stretch", "boosted_stretch"):
        rate = kwargs["rate"]
        if 1.0 + rate * scenario.t_end <= 0.0:
            raise ValidationError("stretch collapses the bar before t_end "
                                  "(1 + rate * t_end <= 0)")
    return scenario


def format_records(records: list[TimeSeriesRecord]) -> str:
    """Render records as CSV text: fixed header, 17 significant digits, LF."""
    lines = [CSV_HEADER]
    for r in records:
        vals = [r.t, r.X, r.beta, r.C_hat, r.j, r.L, r.L_prime, r.T,
                r.lambda_e, r.lambda_p, r.Gamma_p, r.sigma_bar, r.t_y, r.xi]
        lines.append(",".join(f"{v:.17g}" for v in vals) + f",{r.loading.value}")
    return "\n".join(lines) + "\n"


def write_csv(records: list[TimeSeriesRecord], path) -> None:
    """Write records to path; output is byte-identical across reruns."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_records(records))
