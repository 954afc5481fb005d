"""Build n-th neighbour designs over a range of base transmissivities and
report how well every other coupling is cancelled."""
from dataclasses import dataclass

import numpy as np

from cascadenet.errors import ThresholdError
from cascadenet.regular import design_pruned, verify_design
from _common import parse_config, write_rows


@dataclass
class Config:
    n: int = 1
    count: int = 10
    tau_min: float = 0.7
    tau_max: float = 1.0
    steps: int = 31
    out: str = ""


def main(cfg: Config):
    rows = []
    for tau in np.linspace(cfg.tau_min, cfg.tau_max, cfg.steps):
        try:
            rep = verify_design(design_pruned(cfg.n, float(tau), count=cfg.count))
        except ThresholdError as exc:
            # below threshold: record where the recursion broke down
            rows.append((tau, "fail", exc.k, "", ""))
            continue
        rows.append((tau, "ok", "", rep["retained"], rep["max_pruned"]))
    write_rows(["tau_base", "status", "broken_at_k", "abs_xi_n", "max_pruned"], rows, cfg.out or None)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
