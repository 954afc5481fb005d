"""Excitation transfer along a pruned first-neighbour chain.

Site 1 starts excited; populations are written every ``every`` steps.
"""
from dataclasses import dataclass

from cascadenet.dynamics import cascade_generator, evolve, fock_state, populations
from cascadenet.regular import design_pruned
from _common import parse_config, write_rows


@dataclass
class Config:
    M: int = 4
    tau: float = 0.8
    gamma: float = 1.0
    loss: float = 0.0
    t_final: float = 8.0
    dt: float = 0.01
    every: int = 20
    out: str = ""


def main(cfg: Config):
    spec = design_pruned(1, cfg.tau, count=cfg.M - 1).to_regular_spec(cfg.gamma, cfg.loss)
    gen = cascade_generator(spec)
    traj = evolve(gen, fock_state(cfg.M, 2, (1,)), cfg.t_final, cfg.dt, every=cfg.every)
    rows = [(t, *populations(st)) for t, st in zip(traj.times, traj.states)]
    write_rows(["t"] + [f"n_{m}" for m in range(1, cfg.M + 1)], rows, cfg.out or None)


if __name__ == "__main__":
    main(parse_config(Config, __doc__))
