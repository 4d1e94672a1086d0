"""Reference values published for the room-temperature QD/microsphere laser.

Each anchor names the report scalar it is compared with and how the
comparison is judged. ``known`` marks discrepancies that are expected and
reported as flags instead of failures.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class AnchorSpec:
    key: str  # report scalar
    label: str
    value: float | tuple[float, float]
    mode: str  # "abs", "rel", "range", "min", "overlap", "true"
    tolerance: float = 0.0
    known: str = ""  # reason the comparison is flagged rather than judged


ANCHORS: tuple[AnchorSpec, ...] = (
    AnchorSpec("prism_r_re", "Re r, SF11 prism", 0.05, "abs", 0.005),
    AnchorSpec("prism_r_im", "Im r, SF11 prism", 0.999, "abs", 0.005),
    AnchorSpec("sample_abs_r_re", "|Re r|, GaAs sample", 0.77, "abs", 0.02),
    AnchorSpec("sample_r_im", "Im r, GaAs sample", 0.63, "abs", 0.02),
    AnchorSpec("ideal_ratio", "ideal shift/broadening ratio", 0.78, "abs", 0.01),
    AnchorSpec("scattering_efficiency", "useful fraction of sample loss (about one third)", (0.33, 0.37), "range"),
    AnchorSpec("fsr_GHz", "free spectral range (GHz)", 500.0, "rel", 0.10),
    AnchorSpec("Q", "loaded quality factor", 0.3e6, "rel", 0.10),
    AnchorSpec("critical_coupling", "prism set near critical coupling", 1.0, "true"),
    AnchorSpec("scan_fwhm_probe_um", "y-scan FWHM at probe wavelength (um)", (4.5, 6.5), "range"),
    AnchorSpec(
        "scan_fwhm_mode_um",
        "y-scan FWHM at mode wavelength (um)",
        5.0,
        "rel",
        0.10,
        known="probe wavelength behind the quoted 5 um width is not stated",
    ),
    AnchorSpec("mode_volume_um3", "mode volume (um^3)", 5000.0, "rel", 0.01),
    AnchorSpec("l_range", "angular numbers of lasing modes", (550.0, 600.0), "overlap"),
    AnchorSpec("gamma_inh_GHz", "inhomogeneous width (GHz)", 25000.0, "rel", 0.10),
    AnchorSpec("gamma_hom_GHz", "homogeneous width (GHz)", 2500.0, "rel", 0.01),
    AnchorSpec("coupled_dots", "dots resonant with one mode", 60.0, "rel", 0.10),
    AnchorSpec("fsr_coverage", "FSRs inside inhomogeneous band", 50.0, "rel", 0.15),
    AnchorSpec("mode_count", "modes sustained", 10.0, "rel", 0.10),
    AnchorSpec("overall_efficiency", "overall pump efficiency", 0.02, "rel", 0.10),
    AnchorSpec("pair_rate_per_s", "electron-hole pair rate (1/s)", (1.5e13, 1.8e13), "range"),
    AnchorSpec("pairs_per_dot_lifetime", "pairs per dot per lifetime (enough to feed)", 1.0, "min"),
    AnchorSpec("rabi_GHz", "vacuum Rabi frequency (GHz)", 2.0, "rel", 0.10),
    AnchorSpec("hierarchy_ok", "gamma_inh > gamma_hom > FSR > Gamma", 1.0, "true"),
    AnchorSpec("good_cavity", "good-cavity regime gamma_hom >> Gamma", 1.0, "true"),
    AnchorSpec(
        "threshold_per_qd",
        "per-dot threshold parameter Omega^2/(gamma_hom Gamma)",
        1.6e-2,
        "rel",
        0.10,
        known="published value is 10x the consistent-convention result",
    ),
)

# per-dot threshold parameter as printed in the publication, shown next to ours
PUBLISHED_THRESHOLD_PER_QD = 1.6e-2


@dataclass(frozen=True)
class AnchorResult:
    key: str
    label: str
    paper: float | tuple[float, float]
    computed: float | tuple[float, float] | None
    criterion: str
    status: str  # pass, fail, flag, skip
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "key": self.key,
            "label": self.label,
            "paper": list(self.paper) if isinstance(self.paper, tuple) else self.paper,
            "computed": list(self.computed) if isinstance(self.computed, tuple) else self.computed,
            "criterion": self.criterion,
            "status": self.status,
            "note": self.note,
        }


def _criterion(a: AnchorSpec) -> str:
    if a.mode == "abs":
        return f"within +/-{a.tolerance:g}"
    if a.mode == "rel":
        return f"within {a.tolerance * 100:g}%"
    if a.mode == "range":
        return f"in [{a.value[0]:g}, {a.value[1]:g}]"
    if a.mode == "min":
        return f">= {a.value:g}"
    if a.mode == "overlap":
        return f"overlaps [{a.value[0]:g}, {a.value[1]:g}]"
    return "true"


def _judge(a: AnchorSpec, x) -> bool:
    if a.mode == "abs":
        return abs(x - a.value) <= a.tolerance
    if a.mode == "rel":
        return abs(x - a.value) <= a.tolerance * abs(a.value)
    if a.mode == "range":
        return a.value[0] <= x <= a.value[1]
    if a.mode == "min":
        return x >= a.value
    if a.mode == "overlap":
        lo, hi = x
        return lo <= a.value[1] and hi >= a.value[0]
    return bool(x)


def evaluate(scalars: dict) -> list[AnchorResult]:
    out = []
    for a in ANCHORS:
        if a.key == "l_range":
            x = (scalars["l_range_min"], scalars["l_range_max"]) if "l_range_min" in scalars else None
        else:
            x = scalars.get(a.key)
        if x is None:
            out.append(AnchorResult(a.key, a.label, a.value, None, _criterion(a), "skip", "not computed"))
            continue
        ok = _judge(a, x)
        if a.known:
            status, note = "flag", a.known
        else:
            status, note = ("pass" if ok else "fail"), ""
        if a.mode == "true":
            x = bool(x)
        out.append(AnchorResult(a.key, a.label, a.value, x, _criterion(a), status, note))
    return out
