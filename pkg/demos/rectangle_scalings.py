"""Level-n rectangles around the fold and their scaling laws.

For each level n the arc of the stable lamination has two vertical-tangency
parameters t±; the rectangle S_n spanned between the fold tips has width ~
lam^(3n/2), height ~ lam^(n/2), and distance to the axis ~ lam^n.  The root
ratio t+/lam^(n/2) converges to sqrt(1/6) since the fold is a cubic with unit
coefficients.
"""

import math

import tangencylab as tl


def main():
    sys = tl.reference_system()
    lam = sys.saddle.lam
    levels = range(8, 19)

    print("  n      t_plus        width         height        dist        t+/lam^(n/2)")
    rows = []
    for n in levels:
        S = tl.build_sn(sys, n)
        rows.append((n, S))
        ratio = S.t_plus / lam ** (n / 2.0)
        print(f"{n:3d}  {S.t_plus:.6e}  {S.width:.6e}  {S.height:.6e}  {S.dist:.6e}  {ratio:.6f}")
    print(f"\n  sqrt(1/6) = {math.sqrt(1 / 6):.6f}")
    print()

    for name, key, expect in [
        ("dist", lambda S: S.dist, 1.0),
        ("width", lambda S: S.width, 1.5),
        ("height", lambda S: S.height, 0.5),
    ]:
        k, c = tl.scaling_fit([(n, key(S)) for n, S in rows], lam)
        print(f"  {name:6s} ~ {c:.4f} * lam^({k:.4f} n)   expected exponent {expect}")
    print()

    S10 = tl.build_sn(sys, 10)
    print(f"level 10 detail: t in [{S10.t_minus:.6e}, {S10.t_plus:.6e}],")
    print(f"  extended window [{S10.t_ext_minus:.6e}, {S10.t_ext_plus:.6e}],")
    print(f"  aspect ratio rho = width / (dist * height) = {S10.rho:.6f}")


if __name__ == "__main__":
    main()
