"""Energy drift of classical RK4 on the cubic two-degree-of-freedom Hamiltonian.

Reports max |H(x(t)) - H(x(0))| and the drift of the known quartic first
integral. The potential has no well, so every orbit escapes in finite time
(the default start blows up shortly after t = 2); keep t1 below that.
"""

import argparse
from dataclasses import dataclass

from mrk.hamiltonian import HamiltonianSystem, hamilton_equations, rk4
from mrk.symexpr import SymbolTable, compile_numeric, parse

H_TEXT = "1/2*p1^2 + 1/2*p2^2 - 2*q1^3 - 6*q1*q2^2"
I_TEXT = "1/4*(p1 + p2)^2 - (q1 + q2)^3"


@dataclass
class DriftConfig:
    x0: tuple = (0.1, 0.05, 0.0, 0.02)
    t1: float = 1.0
    h: float = 1e-3


def energy_drift(cfg: DriftConfig) -> tuple[float, float]:
    table = SymbolTable(("q1", "q2"), ("p1", "p2"))
    sys = HamiltonianSystem.from_text(H_TEXT, table)
    traj = rk4(hamilton_equations(sys), sys, cfg.x0, cfg.t1, cfg.h)
    H = compile_numeric(sys.H)
    I = compile_numeric(parse(I_TEXT, table))
    env = lambda x: dict(zip(sys.phase, x))
    h0, i0 = H(env(traj[0])), I(env(traj[0]))
    dh = max(abs(H(env(x)) - h0) for x in traj)
    di = max(abs(I(env(x)) - i0) for x in traj)
    return dh, di


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t1", type=float, default=DriftConfig.t1)
    ap.add_argument("--h", type=float, default=DriftConfig.h)
    args = ap.parse_args()
    cfg = DriftConfig(t1=args.t1, h=args.h)
    dh, di = energy_drift(cfg)
    print(f"t1={cfg.t1} h={cfg.h}  max|dH|={dh:.3e}  max|dI|={di:.3e}")


if __name__ == "__main__":
    main()
