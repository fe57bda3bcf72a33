"""Names and value records for the seventeen competitive-balance indices."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError

SEASONAL_INDEX_NAMES = ("namsi", "hhi_star", "agini", "ncr1", "acr_k", "ncr_i", "scr_ki")
PAIRWISE_INDEX_NAMES = ("tau", "dn1", "adn_k", "dn_i", "sdn_ki")
WINDOWED_INDEX_NAMES = ("g",)
DYNAMIC_INDEX_NAMES = ("g",) + PAIRWISE_INDEX_NAMES

# bi-dimensional index -> (seasonal component, dynamic component)
BIDIMENSIONAL_PAIRS = {
    "dc1": ("ncr1", "dn1"),
    "adc_k": ("acr_k", "adn_k"),
    "dc_i": ("ncr_i", "dn_i"),
    "sdc_ki": ("scr_ki", "sdn_ki"),
}
BIDIMENSIONAL_INDEX_NAMES = tuple(BIDIMENSIONAL_PAIRS)

ALL_INDEX_NAMES = SEASONAL_INDEX_NAMES + DYNAMIC_INDEX_NAMES + BIDIMENSIONAL_INDEX_NAMES

_VALUE_TOL = 1e-9


@dataclass(frozen=True)
class IndexValue:
    """One index value for one country-season, on the 0=balance..1=imbalance scale."""

    name: str
    country: str
    season: int
    value: float

    def __post_init__(self) -> None:
        if self.name not in ALL_INDEX_NAMES:
            raise InputError(f"unknown index name {self.name!r}")
        if not (-_VALUE_TOL <= self.value <= 1.0 + _VALUE_TOL):
            raise InputError(
                f"{self.name} for ({self.country}, {self.season}) out of [0, 1]: {self.value}"
            )
