"""Estimate the conjugacy modulus rho = -ln mu / ln lam from return data.

Each level-n arc returns to unit scale after m_n saddle iterates; the
fractional return exponent s_n solves mu^s * x_n = 1 and the steps
s_{n+1} - s_n converge to -ln lam / ln mu, so a line fit of s_n against n
recovers the modulus.  The modulus is a conjugacy invariant: a rescaled copy
of the system reports the same value, while changing lam changes it.
"""

import math

import tangencylab as tl


def main():
    sys = tl.reference_system()
    lam, mu = sys.saddle.lam, sys.saddle.mu

    print("  n    m_n    s_n          c_n")
    for n, s_n, c_n in tl.sn_cn_series(sys, range(8, 19)):
        rec = tl.return_record(sys, n)
        print(f"{n:3d}  {rec.m_n:5d}  {s_n:11.6f}  {c_n:.12f}")
    print()

    rho, err = tl.modulus_fit(sys, range(8, 19))
    exact = -math.log(lam) / math.log(mu)
    print(f"modulus fit: rho = {rho:.5f} +- {err:.5f}   (-ln lam / ln mu = {exact:.5f})")

    slow = tl.slow_system()
    rho_slow, _ = tl.modulus_fit(slow, range(8, 19))
    exact_slow = -math.log(slow.saddle.lam) / math.log(slow.saddle.mu)
    print(f"lam=0.5 system: rho = {rho_slow:.5f}   (exact {exact_slow:.5f})")

    lam_hat, mu_hat = tl.eigenvalue_estimates(sys, range(8, 19))
    print(f"eigenvalues recovered from the same data: lam={lam_hat:.6f} mu={mu_hat:.6f}")
    print()

    # conjugate pairs: the boundary map along the unstable axis is a power law
    # h(x) = C x^tau; tau = 1 exactly when the moduli agree
    for name, pair in [("identity", tl.identity_pair(sys)), ("rescale", tl.rescale_pair(sys, 1))]:
        pts = tl.correspondence_points(pair, range(8, 19))
        c_fit, tau_fit = tl.power_fit(pts)
        c_pred = tl.lemma_constant(pair, tau_fit)
        hits = sum(tl.intersection_check(pair, n) for n in range(10, 17))
        print(f"{name:8s} pair: C={c_fit:.8f} tau={tau_fit:.8f} "
              f"(predicted C={c_pred:.8f}), arc intersections {hits}/7 on n=10..16")

    pair = tl.mismatched_pair(sys, 0.5)
    _, tau = tl.power_fit(tl.correspondence_points(pair, range(8, 19)))
    print(f"mismatched lam=0.5 partner: tau={tau:.6f} "
          f"(= ln 0.5 / ln 0.3 = {math.log(0.5) / math.log(0.3):.6f}, no conjugacy)")


if __name__ == "__main__":
    main()
