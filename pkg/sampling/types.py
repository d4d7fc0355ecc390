from dataclasses import dataclass


@dataclass(frozen=True)
class UndersampleSpec:
    """Share of the large class kept in one class undersample."""
    percent: float

    def __post_init__(self):
        if not 0.0 < self.percent <= 1.0:
            raise ValueError(f"percent must lie in (0, 1], got {self.percent}")
