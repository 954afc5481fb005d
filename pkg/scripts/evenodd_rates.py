"""Nonzero GKSL rates of the even/odd network against tau_1, numerics next
to the analytic two-operator form."""
from dataclasses import dataclass
import math

import numpy as np

from cascadenet.amplitudes import coupling_matrix
from cascadenet.gksl import build_theta, gksl_decompose, lindblad_closed_form_evenodd
from cascadenet.network import RegularSpec
from _common import parse_config, write_rows


@dataclass
class Config:
    M: int = 5
    gamma: float = 1.0
    steps: int = 21
    out: str = ""


def main(cfg: Config):
    rows = []
    for tau1 in np.linspace(0, 1, cfg.steps):
        taus = ([tau1, 0.0] + [0.5] * cfg.M)[: cfg.M - 1]
        phis = ([-math.pi / 2, 0.0] + [0.0] * cfg.M)[: cfg.M - 1]
        z = coupling_matrix(RegularSpec(cfg.M, taus, phis, 0.0, cfg.gamma))
        num = gksl_decompose(build_theta(z, cfg.gamma), z).rates
        ana = lindblad_closed_form_evenodd(cfg.M, float(tau1), cfg.gamma).rates
        rows.append((tau1, num[0], num[1], ana[0], ana[1]))
    write_rows(["tau1", "rate1", "rate2", "rate1_closed", "rate2_closed"], rows, cfg.out or None)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
