"""Pass/fail thresholds shared by the verifiers, the report and the CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    affine: float = 1e-9
    parallelogram: float = 1e-9
    lipschitz: float = 1e-9
    normalized: float = 1e-6
    pseudometric: float = 1e-9
    additivity: float = 1e-9
    isometry: float = 1e-12
    factorization: float = 1e-9
    quotient: float = 1e-9
    bruhat_tits: float = 1e-8
    cat: float = 1e-8
    clamp: float = 1e-9

    def override(self, value: float) -> "Tolerances":
        """Every threshold set to ``value`` (the ``--tol`` flag)."""
        return replace(self, **{f.name: float(value) for f in fields(self)})

    def updated(self, **values) -> "Tolerances":
        unknown = set(values) - {f.name for f in fields(self)}
        if unknown:
            raise KeyError(f"unknown tolerance(s): {', '.join(sorted(unknown))}")
        return replace(self, **{k: float(v) for k, v in values.items()})

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT = Tolerances()
