"""Which passive generators exist for each built-in field, decided exactly."""

from __future__ import annotations

from dataclasses import dataclass, field

from magtrans.fields import PhysicalConstants, builtin
from magtrans.generators import NonIntegrableReport, passive_rotation_generator, passive_translation_generator


@dataclass
class Config:
    fields: list = field(default_factory=lambda: [
        ("zero", {}),
        ("symmetric", {"B": ["0", "0", "1"]}),
        ("symmetric", {"B": ["1", "2", "2"]}),
        ("landau", {"B": "1", "axis": 1}),
        ("gradient", {"B0": "1", "beta": "1"}),
        ("dipole", {"mu": ["0", "0", "1"]}),
        ("dipole", {"mu": ["1", "0", "0"]}),
    ])


def status(result) -> str:
    return "-" if isinstance(result, NonIntegrableReport) else "yes"


def main(cfg: Config = Config()) -> None:
    consts = PhysicalConstants(1, 1, 1, 1)
    print(f"{'field':38s} {'G1':>4s} {'G2':>4s} {'G3':>4s} {'L1':>4s} {'L2':>4s} {'L3':>4s}")
    for kind, params in cfg.fields:
        A = builtin(kind, **params)
        cells = [status(passive_translation_generator(A, k, consts)) for k in (1, 2, 3)]
        cells += [status(passive_rotation_generator(A, k, consts)) for k in (1, 2, 3)]
        print(f"{A.label:38s} " + " ".join(f"{c:>4s}" for c in cells))


if __name__ == "__main__":
    main()
