"""Shareholder classification used throughout the package."""

from __future__ import annotations

import enum


class OwnerType(enum.IntEnum):
    """The 13 owner categories recorded for each shareholder."""

    VentureCapital = 1
    FinancialCo = 2
    Families = 3
    PublicCo = 4
    State = 5
    HedgeFunds = 6
    InsuranceCo = 7
    SelfOwned = 8
    PrivateEquity = 9
    Corporates = 10
    Mutuals = 11
    Banks = 12
    Foundations = 13

    @classmethod
    def parse(cls, value: str | int) -> "OwnerType":
        """Accept either the integer id (``"3"``) or the label (``"Families"``)."""
        if isinstance(value, str):
            text = value.strip()
            if text.lstrip("+-").isdigit():
                value = int(text)
            else:
                try:
                    return cls[text]
                except KeyError:
                    raise ValueError(f"unknown owner type label {value!r}") from None
        try:
            return cls(int(value))
        except ValueError:
            raise ValueError(f"owner type id {value!r} outside 1..13") from None


N_TYPES = len(OwnerType)

# Census of shareholder types for the two reference datasets (Turkey, Netherlands).
TURKEY_TYPE_COUNTS = {
    OwnerType.VentureCapital: 6,
    OwnerType.FinancialCo: 133,
    OwnerType.Families: 53360,
    OwnerType.PublicCo: 1,
    OwnerType.State: 26,
    OwnerType.HedgeFunds: 1,
    OwnerType.InsuranceCo: 34,
    OwnerType.SelfOwned: 1,
    OwnerType.PrivateEquity: 18,
    OwnerType.Corporates: 4007,
    OwnerType.Mutuals: 91,
    OwnerType.Banks: 127,
    OwnerType.Foundations: 15,
}

NETHERLANDS_TYPE_COUNTS = {
    OwnerType.VentureCapital: 143,
    OwnerType.FinancialCo: 7028,
    OwnerType.Families: 663,
    OwnerType.PublicCo: 1,
    OwnerType.State: 162,
    OwnerType.HedgeFunds: 16,
    OwnerType.InsuranceCo: 235,
    OwnerType.SelfOwned: 1,
    OwnerType.PrivateEquity: 282,
    OwnerType.Corporates: 156644,
    OwnerType.Mutuals: 9563,
    OwnerType.Banks: 363,
    OwnerType.Foundations: 20059,
}


def type_mix(counts: dict[OwnerType, int]) -> list[float]:
    """Probability vector over type ids 1..13 from a census."""
    total = sum(counts.values())
    return [counts.get(t, 0) / total for t in OwnerType]
