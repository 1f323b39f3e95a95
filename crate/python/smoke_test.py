"""Smoke test for the gearsynth Python extension.

Build and install first:
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/gearsynth-*.whl
"""
import math
from fractions import Fraction

import gearsynth


def main():
    design = gearsynth.GearboxDesign(44, 44, 32, 132, 120, n_planets=4, module_mm="0.6", rotor_bore_mm="79.4")
    assert design.gear_ratio() == Fraction(20)
    assert abs(design.carrier_clearance() - math.pi / 12) < 1e-12
    assert design.module_mm == Fraction(3, 5)

    spec = gearsynth.SynthesisSpec(20, "79.4", "0.6", n_planets=4, top_k=20)
    feasible, entries = gearsynth.validate(design, spec)
    assert feasible and len(entries) == 12, entries
    assert abs(spec.cost(design) - 17360.111627640035) < 1e-9

    result = gearsynth.synthesize(spec, workers=4)
    assert result["feasible_count"] == 11
    teeth = [tuple(s["teeth"]) for s in result["solutions"]]
    assert teeth[0] == (28, 24, 18, 76, 70)
    assert (44, 44, 32, 132, 120) in teeth
    oracle = gearsynth.oracle_synthesize(spec)
    assert teeth == [tuple(s["teeth"]) for s in oracle["solutions"]]
    assert result["prune_counts"] == oracle["prune_counts"]

    rows = gearsynth.sweep(spec, "n_planets", ["3", "1"])
    assert rows[0][1] is not None and rows[1][2] is not None
    assert (44, 44, 32, 132, 120) not in [tuple(s["teeth"]) for s in rows[0][1]["solutions"]]

    try:
        gearsynth.GearboxDesign(44, 44, 44, 132, 132).gear_ratio()
    except ZeroDivisionError:
        pass
    else:
        raise AssertionError("degenerate ratio not reported")

    torques = {a.name: a.peak_output_torque() for a in gearsynth.ActuatorSpec.bundled()}
    assert torques == {"D151": 320.0, "D110A": 176.0}, torques

    print("gearsynth python smoke test: ok")


if __name__ == "__main__":
    main()
