"""Named experiment configurations.

Each preset is a list of :class:`SweepSpec` variants; run them one by one.
Step-rule grids use the default 0.02 resolution.
"""

from __future__ import annotations

import math

from .sweep import SweepSpec

# rewiring ladder for the logistic-rule speed experiment
REWIRE_LADDER = (0.0, 0.001, 0.01, 0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0)


def _cm07() -> list[SweepSpec]:
    common = dict(rule="logistic", m_values=tuple(range(1, 11)), k=8, i=2, n_seeds=2,
                  T=math.inf, rewire_fractions=REWIRE_LADDER, speed_fraction=0.90)
    return [SweepSpec(label="cm07-ring", topology="ring", n=2000, **common),
            SweepSpec(label="cm07-moore", topology="moore", rows=40, cols=50, **common)]


def _c2010() -> list[SweepSpec]:
    out = []
    for topology, k, rows, cols in (("hex", 6, 8, 16), ("moore", 8, 12, 12)):
        for T in (1, 2):
            for sigma in (0.0, 0.1):
                out.append(SweepSpec(label=f"c2010-{topology}-T{T}-sd{sigma}", topology=topology,
                                     k=k, rows=rows, cols=cols, i=2, T=T, sigma=sigma,
                                     seeding="random", n_seeds=1))
    return out


def _fig2() -> list[SweepSpec]:
    return [SweepSpec(label=f"fig2-k{k}-i{i}", k=k, i=i, T=1)
            for k in (4, 8) for i in (2, 3)]


def _fig3() -> list[SweepSpec]:
    out = [SweepSpec(label=f"fig3-degree-k{k}", k=k, i=2, T=1) for k in range(4, 22, 2)]
    out += [SweepSpec(label=f"fig3-time-T{T}", k=8, i=2, T=T) for T in (1, 2, 3, 4, 5)]
    out.append(SweepSpec(label="fig3-time-Tinf", k=8, i=2, T=math.inf))
    out += [SweepSpec(label=f"fig3-threshold-i{i}", k=8, i=i, T=1) for i in (2, 3, 4)]
    return out


PRESETS = {"cm07": _cm07, "c2010": _c2010, "fig2": _fig2, "fig3": _fig3}


def preset(name: str) -> list[SweepSpec]:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
