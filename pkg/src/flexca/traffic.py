"""FTP-style traffic: Poisson file arrivals per UE with a fixed file size."""

from dataclasses import dataclass

import numpy as np

from .seeding import generator

_TRAFFIC_KEY = 0x7AF1C


@dataclass(frozen=True)
class TrafficModel:
    direction: str = "ul"                 # "ul" or "dl"
    arrival_rate_per_slot: float = 0.002  # Poisson file arrivals per UE per tick
    file_size_bits: float = 2e6
    n_ues: int = 5
    serving_cells: tuple[str, ...] = ()   # empty = every active cell serves data

    def __post_init__(self):
        if self.direction not in ("ul", "dl"):
            raise ValueError("traffic direction must be 'ul' or 'dl'")
        if self.arrival_rate_per_slot < 0:
            raise ValueError("arrival rate must be non-negative")
        if self.file_size_bits <= 0 or self.n_ues < 1:
            raise ValueError("file size and UE count must be positive")
        object.__setattr__(self, "serving_cells", tuple(self.serving_cells))


def generate_traffic(model: TrafficModel, horizon: int, seed: int) -> np.ndarray:
    """File-arrival counts, shape (n_ues, horizon).

    Each UE draws from its own generator keyed by (seed, ue), so traces are
    independent across UEs and stable when the UE count changes.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    out = np.zeros((model.n_ues, horizon), dtype=np.int64)
    if model.arrival_rate_per_slot == 0.0:
        return out
    for ue in range(model.n_ues):
        rng = generator(seed, _TRAFFIC_KEY, ue)
        out[ue] = rng.poisson(model.arrival_rate_per_slot, horizon)
    return out
