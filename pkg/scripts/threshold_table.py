"""Smallest tau_1 for which the pruning recursion stays physical up to order k."""
from dataclasses import dataclass

from cascadenet.regular import threshold_scan
from _common import parse_config, write_rows


@dataclass
class Config:
    kmin: int = 2
    kmax: int = 40
    grid: float = 1e-4
    refine: bool = False
    out: str = ""


def main(cfg: Config):
    rows = [(k, threshold_scan(k, cfg.grid, cfg.refine)) for k in range(cfg.kmin, cfg.kmax + 1)]
    write_rows(["k", "threshold"], rows, cfg.out or None)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
