"""Distance between the cascade generator and its diagonalised GKSL form on
random networks."""
from dataclasses import dataclass
import math

import numpy as np

from cascadenet.amplitudes import coupling_matrix
from cascadenet.dynamics import cascade_generator, gksl_generator
from cascadenet.gksl import build_theta, gksl_decompose
from cascadenet.network import BeamSplitter, NetworkSpec
from _common import parse_config, write_rows


@dataclass
class Config:
    samples: int = 20
    max_M: int = 4
    d: int = 2
    loss: float = 0.1
    seed: int = 0
    out: str = ""


def random_network(rng, M, loss):
    elements = {
        (m, mp): BeamSplitter(rng.uniform(0, 1), rng.uniform(0, 2 * math.pi))
        for m in range(1, M)
        for mp in range(m + 1, M + 1)
    }
    return NetworkSpec(M, elements, loss, rng.uniform(0.2, 3))


def main(cfg: Config):
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for i in range(cfg.samples):
        M = 1 + i % cfg.max_M
        net = random_network(rng, M, cfg.loss)
        z = coupling_matrix(net)
        form = gksl_decompose(build_theta(z, net.gamma), z)
        dist = (cascade_generator(net, cfg.d) - gksl_generator(form, cfg.d)).frobenius()
        rows.append((i, M, net.gamma, dist))
    write_rows(["sample", "M", "gamma", "frobenius"], rows, cfg.out or None)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
