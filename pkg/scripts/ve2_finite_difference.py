"""Compare the symbolic VE2 forcing of the quartic Hamiltonian with finite differences.

The forcing is the second-order Taylor term of the vector field at the point
(q1, 0, p1, 0); a central second difference of X(x + eps*xi) gives
(1/2) d^2X[xi, xi] up to O(eps^2).
"""

import argparse
import random
from dataclasses import dataclass

from mrk.cli import load
from mrk.hamiltonian import HamiltonianSystem, hamilton_equations
from mrk.symexpr import compile_numeric
from mrk.variational import InvariantPlane, generic_solution, restrict_to_plane, second_variational


@dataclass
class FDConfig:
    problem: str = "problems/quartic.problem"
    q1: float = 1.0  # value of q1(t) at t = 1
    eps: float = 1e-3
    trials: int = 10
    seed: int = 0xC0FFEE


def max_error(cfg: FDConfig) -> float:
    prob = load(cfg.problem)
    sys = HamiltonianSystem.from_text(prob.hamiltonian, prob.table)
    X = hamilton_equations(sys)
    plane = InvariantPlane.of(sys, prob.plane)
    ve2 = second_variational(sys, plane, generic_solution(restrict_to_plane(sys, plane, X)), X)
    params = {name: 1.0 for name in sys.table.parameters}
    fX = [compile_numeric(c) for c in X]
    forcing = [compile_numeric(f) for f in ve2.forcing]
    rng = random.Random(cfg.seed)
    worst = 0.0
    for _ in range(cfg.trials):
        xi = [rng.uniform(-1, 1) for _ in sys.phase]
        base = {"q1": cfg.q1, "q2": 0.0, "p1": rng.uniform(-1, 1), "p2": 0.0}
        env = {**params, **base, **dict(zip(ve2.xi, xi))}

        def at(s):
            pt = {k: base[k] + s * x for k, x in zip(sys.phase, xi)}
            return [g({**params, **pt}) for g in fX]

        plus, mid, minus = at(cfg.eps), at(0.0), at(-cfg.eps)
        for k, f in enumerate(forcing):
            fd = (plus[k] - 2 * mid[k] + minus[k]) / (2 * cfg.eps ** 2)
            worst = max(worst, abs(fd - f(env)))
    return worst


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=FDConfig.eps)
    args = ap.parse_args()
    cfg = FDConfig(eps=args.eps)
    print(f"eps={cfg.eps}  max |fd - symbolic| = {max_error(cfg):.3e}")


if __name__ == "__main__":
    main()
