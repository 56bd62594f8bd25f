"""Named parameter presets and bundled simulation plans.

The presets reproduce the published decoder parameter table: one row per
(channel, code) pair with the correlation coefficient alpha, inversion
threshold offset delta, bit-flip probability p and momentum vector rho.
Each decoder family picks the parameters it uses: GDBF(alpha, delta),
PGDBF(alpha, delta, p), GDBF-w/M(alpha, delta, rho),
PGDBF-w/M(alpha, delta, p, rho).
"""
from __future__ import annotations

from .decoder import GdbfConfig
from .mp import MpConfig

# (alpha, delta, p, rho) per (channel, code) row
PRESETS: dict[str, dict] = {
    "bsc-reg3x6":  {"alpha": 0.5, "delta": 0.0, "p": 0.9,
                    "rho": (2, 2, 2, 1)},
    "bsc-reg4x8":  {"alpha": 1.0, "delta": 0.0, "p": 0.9,
                    "rho": (4, 2, 1)},
    "bsc-reg6x32": {"alpha": 2.0, "delta": 0.0, "p": 0.8,
                    "rho": (4, 3, 2, 1)},
    "awgn-reg4x8": {"alpha": 1.8, "delta": 1.1, "p": 0.9,
                    "rho": (2, 2, 2, 2, 2, 1, 1)},
    "awgn-reg6x32": {"alpha": 4.5, "delta": 1.2, "p": 0.8,
                     "rho": (3, 3, 2, 1)},
}

FAMILIES = ("bf", "gdbf", "pgdbf", "gdbf-wm", "pgdbf-wm",
            "bp", "ms", "ms-q4")


def preset_config(preset: str, family: str, max_iter: int = 300):
    """Decoder config for a preset row and a decoder family name."""
    family = family.lower()
    if family in ("bp", "ms", "ms-q4"):
        return MpConfig(variant=family.upper().replace("-", "_"))
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; "
                         f"choose from {sorted(PRESETS)}")
    row = PRESETS[preset]
    if family == "bf":
        return GdbfConfig(variant="BF", max_iter=max_iter)
    if family == "gdbf":
        return GdbfConfig(variant="GDBF", alpha=row["alpha"],
                          delta=row["delta"], max_iter=max_iter)
    if family == "pgdbf":
        return GdbfConfig(variant="PGDBF", alpha=row["alpha"],
                          delta=row["delta"], p=row["p"], max_iter=max_iter)
    if family == "gdbf-wm":
        return GdbfConfig(variant="GDBF_WM", alpha=row["alpha"],
                          delta=row["delta"], rho=row["rho"],
                          max_iter=max_iter)
    if family == "pgdbf-wm":
        return GdbfConfig(variant="PGDBF_WM", alpha=row["alpha"],
                          delta=row["delta"], p=row["p"], rho=row["rho"],
                          max_iter=max_iter)
    raise ValueError(f"unknown decoder family {family!r}; "
                     f"choose from {FAMILIES}")


BUILTIN_PLANS = {
    "table1-bsc-reg3x6": """\
[plan]
code = reg3x6
points = bsc:0.02 bsc:0.03 bsc:0.04 bsc:0.05
max_frames = 10000
target_errors = 100
seed = 1

[decoder gdbf]
variant = GDBF
alpha = 0.5
delta = 0

[decoder pgdbf]
variant = PGDBF
alpha = 0.5
delta = 0
p = 0.9

[decoder gdbf-wm]
variant = GDBF_WM
alpha = 0.5
delta = 0
rho = [2, 2, 2, 1]

[decoder pgdbf-wm]
variant = PGDBF_WM
alpha = 0.5
delta = 0
p = 0.9
rho = [2, 2, 2, 1]

[decoder bp]
variant = BP
iterations = 50

[decoder ms-q4]
variant = MS_Q4
iterations = 50
""",
    "table1-bsc-reg4x8": """\
[plan]
code = reg4x8
points = bsc:0.02 bsc:0.03 bsc:0.04 bsc:0.05
max_frames = 10000
target_errors = 100
seed = 1

[decoder gdbf]
variant = GDBF
alpha = 1.0
delta = 0

[decoder pgdbf]
variant = PGDBF
alpha = 1.0
delta = 0
p = 0.9

[decoder gdbf-wm]
variant = GDBF_WM
alpha = 1.0
delta = 0
rho = [4, 2, 1]

[decoder pgdbf-wm]
variant = PGDBF_WM
alpha = 1.0
delta = 0
p = 0.9
rho = [4, 2, 1]

[decoder bp]
variant = BP
iterations = 50

[decoder ms-q4]
variant = MS_Q4
iterations = 50
""",
}


def builtin_plan_text(name: str) -> str:
    if name not in BUILTIN_PLANS:
        raise ValueError(f"unknown bundled plan {name!r}; "
                         f"choose from {sorted(BUILTIN_PLANS)}")
    return BUILTIN_PLANS[name]
