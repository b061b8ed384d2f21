"""Reference values frozen into the Rust tests.

Run with `python3 mpmath_reference.py`; requires mpmath. Everything here is
computed from mpmath's own Bessel/Gamma implementations at 30 digits and is
independent of the quadrature path used by the crate.
"""
import mpmath as mp

mp.mp.dps = 30


def kd(mu, x):
    k = mp.besselk(mu, x)
    dk = -(mp.besselk(mu - 1, x) + mp.besselk(mu + 1, x)) / 2
    return k, dk


def nu_squared(alpha, l):
    alpha = mp.mpf(alpha)
    return l * l / alpha**2 - (1 - alpha**2) / (4 * alpha**2)


def matching_roots(mu, c, lo, hi, per_decade=400):
    """Roots of x K'(x) - c K(x) (c=None means K(x)=0) on a log grid."""
    def g(x):
        k, dk = kd(mu, x)
        v = k if c is None else x * dk - c * k
        return v.real
    roots = []
    n = int(per_decade * mp.log10(hi / lo))
    xs = [lo * (hi / lo) ** (mp.mpf(i) / n) for i in range(n + 1)]
    gs = [g(x) for x in xs]
    for i in range(n):
        if gs[i] == 0 or gs[i] * gs[i + 1] < 0:
            roots.append(mp.findroot(g, (xs[i], xs[i + 1]), solver="anderson"))
    return sorted(roots, reverse=True)


if __name__ == "__main__":
    print("K_0(1) =", mp.besselk(0, 1))
    nu = mp.sqrt(3) / 2
    for x in ["1e-4", "0.01", "0.5", "2", "10"]:
        k, dk = kd(1j * nu, mp.mpf(x))
        print(f"K_i{float(nu):.6f}({x}) = {mp.nstr(k.real, 20)}  x K'/K = {mp.nstr((mp.mpf(x) * dk / k).real, 20)}")
    for v in [0.3, 0.5, 0.866025403784438646763723170753, 1.0, 1.58989866902824285721183243882]:
        print(f"arg Gamma(1 + i {v}) =", mp.arg(mp.gamma(1 + 1j * mp.mpf(v))))
    for v in [0.25, 0.5, 0.75]:
        print(f"Gamma(1+{v})/Gamma(1-{v}) =", mp.gamma(1 + v) / mp.gamma(1 - v))

    print("Dirichlet zeros, alpha=0.5, l=0")
    mu = 1j * nu
    for r in matching_roots(mu, None, mp.mpf("1e-8"), 10):
        print("  ", r)
    for alpha in [0.3, 0.5, 0.8]:
        ns = nu_squared(alpha, 0)
        nabs = mp.sqrt(-ns)
        q = (1 - mp.mpf(alpha)) / mp.mpf(alpha)
        for name, c in [("integral", q - ns / 2), ("literal", q + ns / 2)]:
            rs = matching_roots(1j * nabs, c, mp.mpf("1e-8"), 10)
            print(f"alpha={alpha} {name} c={mp.nstr(c, 17)} roots:", [mp.nstr(r, 17) for r in rs])
    for alpha in [1.5, 2, 3]:
        a = mp.mpf(alpha)
        q = (1 - a) / a
        l = 0
        while nu_squared(alpha, l) < 1:
            ns = nu_squared(alpha, l)
            c = q - ns / 2
            rs = matching_roots(mp.sqrt(ns), c, mp.mpf("1e-8"), 10)
            print(f"alpha={alpha} l={l} nu2={mp.nstr(ns, 17)} c={mp.nstr(c, 17)} roots:", [mp.nstr(r, 17) for r in rs])
            l += 1
