import pytest

from flexca.spectrum import Band, Carrier, Catalog, SlotPattern

PATTERN_A = SlotPattern("DDDSUDDSUU", (10, 2, 2))
PATTERN_B = SlotPattern("DDDDDDDSUU", (6, 4, 4))


@pytest.fixture
def catalog() -> Catalog:
    """Four-band catalog: two TDD bands, one of them UL-only, one FDD pair."""
    bands = [
        Band("fdd1", "FDD"),
        Band("tdd2", "TDD"),
        Band("tdd3", "TDD", regulatory_restriction="ul_only"),
        Band("fdd4", "FDD"),
    ]
    carriers = [
        Carrier("f1_dl", "fdd1", "DL", 700.0, 20.0, 15),
        Carrier("f1_ul", "fdd1", "UL", 690.0, 20.0, 15),
        Carrier("f3", "tdd2", "bidirectional", 4000.0, 100.0, 30,
                slot_pattern=PATTERN_A),
        Carrier("f4", "tdd3", "bidirectional", 2300.0, 100.0, 30,
                slot_pattern=PATTERN_B),
        Carrier("f5_dl", "fdd4", "DL", 2000.0, 20.0, 15),
        Carrier("f5_ul", "fdd4", "UL", 1900.0, 20.0, 15),
    ]
    return Catalog.build(bands, carriers)
