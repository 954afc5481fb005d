"""|xi_k| for k = 1..kmax over the (tau_1, phi_2) plane of the two-channel network.

Writes long-format CSV (tau1, phi2, k, abs_xi) for plotting heat maps.
"""
from dataclasses import dataclass
import math

import numpy as np

from cascadenet.regular import sweep
from _common import parse_config, write_rows


@dataclass
class Config:
    phi1: float = 0.0
    tau_steps: int = 101
    phi2_steps: int = 101
    kmax: int = 4
    workers: int = 4
    out: str = ""


def main(cfg: Config):
    tau1s = np.linspace(0, 1, cfg.tau_steps)
    phi2s = np.linspace(0, 2 * math.pi, cfg.phi2_steps)
    rows = sweep(tau1s, phi2s, cfg.phi1, cfg.kmax, cfg.workers)
    write_rows(["tau1", "phi2", "k", "abs_xi"], rows, cfg.out or None)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
