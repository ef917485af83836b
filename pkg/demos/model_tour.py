"""Tour of the local model: the saddle map, the transition map, and the
standing hypotheses.

Builds the reference system (lam=0.3, mu=1.02), pushes a few points through
f and phi, prints the hypothesis checklist from validate(), the expansion
bounds for the return rectangle, and the sign-case classification.
"""

import tangencylab as tl


def main():
    sys = tl.reference_system()
    eps = sys.epsilon
    print(f"reference system: lam={sys.saddle.lam} mu={sys.saddle.mu} eps={eps:.6g}")
    print(f"transition jet: a={sys.transition.a} b={sys.transition.b} "
          f"c={sys.transition.c} d={sys.transition.d} e={sys.transition.e}")
    print()

    # orbit of the seed tip under the saddle map: x expands by mu, y contracts by lam
    p = (1.0, 0.5)
    print("saddle orbit of (1.0, 0.5):")
    for k in range(4):
        q = tl.apply_linear(sys, p, k)
        print(f"  f^{k}: ({q[0]:.6f}, {q[1]:.6f})")
    print()

    # the transition map sends the tangency point (1, 0) to (0, 1) and folds
    # nearby points onto a cubic graph
    for q in [(1.0, 0.0), (1.1, 0.0), (0.9, 0.0), (1.0, 0.01)]:
        img = tl.apply_phi(sys, q)
        print(f"  phi{q} = ({img[0]:.10g}, {img[1]:.10g})")
    print()

    print("hypothesis checklist:")
    rep = tl.validate(sys)
    for cond in rep.entries:
        mark = "ok " if cond.passed else "BAD"
        print(f"  [{mark}] {cond.name:18s} {cond.measured}")
    print()

    tau_lo, tau_hi = tl.tau_bounds(sys)
    print(f"expansion bounds on the return rectangle: tau0={tau_lo:.6g} tau1={tau_hi:.6g}")
    print(f"  small-expansion condition tau1*eps < 1: {tau_hi * eps:.4f} < 1")
    print()

    case, adapt = tl.classify_system(sys)
    print(f"sign case {case.label}: adaptable={adapt.adaptable} "
          f"quadrant={adapt.sn_quadrant} region={adapt.region}")


if __name__ == "__main__":
    main()
