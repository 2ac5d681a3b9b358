"""Reference values for the integration tests, computed with mpmath.

Run from this directory: python3 gen_oracles.py
"""
import mpmath as mp

mp.mp.dps = 40


def hermite():
    rows = []
    for nu in [-2.5, -1.3, -0.5, 0.3, 1.7, 4.2, 10.5, 25.3, 60.7]:
        for x in [-3.0, -1.5, -0.4, 0.0, 0.8, 2.2, 4.5]:
            rows.append((nu, x, mp.hermite(nu, x)))
    with open("hermite.csv", "w") as f:
        f.write("nu,x,value\n")
        for nu, x, v in rows:
            f.write(f"{nu},{x},{mp.nstr(v, 20)}\n")


def kummer():
    with open("kummer.csv", "w") as f:
        f.write("a,b,z,value\n")
        for a in [-30.3, -5.5, -0.7, 0.4, 2.5, 12.2]:
            for b in [0.5, 1.5, 2.5]:
                for z in [-20.0, -3.0, 0.5, 12.25, 25.0, 45.0, 80.0]:
                    f.write(f"{a},{b},{z},{mp.nstr(mp.hyp1f1(a, b, z), 20)}\n")


def roots(b, count):
    f = lambda a: mp.hermite(a, -b)
    out, a, fa, step = [], mp.mpf("1e-12"), None, mp.mpf("0.05")
    fa = f(a)
    while len(out) < count:
        an = a + step
        fn = f(an)
        if fa * fn < 0:
            out.append(mp.findroot(f, (a, an), solver="illinois", verify=False))
        a, fa = an, fn
    return out


def eigen():
    with open("eigen.csv", "w") as f:
        f.write("b,k,alpha,term0\n")
        for b in [0.5, 1.0, 1.5, 2.0, 3.0]:
            g = lambda a: mp.hermite(a, -b)
            for k, r in enumerate(roots(b, 45)):
                # c_k phi_k(0), independent of the eigenfunction normalisation
                term = -mp.hermite(r, 0) / (r * mp.diff(g, r))
                f.write(f"{b},{k},{mp.nstr(r, 20)},{mp.nstr(term, 20)}\n")


def survival():
    # E[exp(-s tau)] = H_{-s}(-x) / H_{-s}(-b); invert (1 - that)/s
    with open("survival.csv", "w") as f:
        f.write("x,b,t,value\n")
        for x, b in [(0.0, 1.5), (-1.0, 1.0), (0.5, 2.0), (-2.0, 0.5)]:
            lt = lambda s: (1 - mp.hermite(-s, -x) / mp.hermite(-s, -b)) / s
            for t in [0.25, 0.5, 1.0, 2.0, 5.0]:
                v = mp.invertlaplace(lt, t, method="talbot")
                f.write(f"{x},{b},{t},{mp.nstr(v, 16)}\n")


def mean_fpt():
    with open("mean_fpt.csv", "w") as f:
        f.write("x,b,value\n")
        for x, b in [(0.0, 1.0), (-2.0, 3.0), (0.5, 0.75), (-1.0, -0.5)]:
            v = mp.sqrt(mp.pi) * mp.quad(lambda y: mp.exp(y * y) * (1 + mp.erf(y)), [x, b])
            f.write(f"{x},{b},{mp.nstr(v, 20)}\n")


def truncation():
    # smallest n whose median first-passage time is within 5% of the one
    # using every eigenvalue below 200
    with open("truncation.csv", "w") as f:
        f.write("x,b,n\n")
        for x, b in [(-2.0, 3.0), (0.0, 1.5), (1.0, 1.5), (1.4, 1.5), (-1.0, 0.5), (0.25, 0.5)]:
            g = lambda a: mp.hermite(a, -b)
            rs = [r for r in roots(b, 120) if r < 200]
            w = [-mp.hermite(r, -x) / (r * mp.diff(g, r)) for r in rs]

            def quantile(n):
                s = lambda t: sum(w[j] * mp.exp(-rs[j] * t) for j in range(n)) - mp.mpf(0.5)
                lo, hi = mp.mpf("1e-8"), mp.mpf(50)
                if s(lo) <= 0:
                    return None
                while s(hi) >= 0:
                    lo, hi = hi, 2 * hi
                return mp.findroot(s, (lo, hi), solver="illinois", verify=False)

            q = quantile(len(rs))
            n = next(n for n in range(1, len(rs) + 1) if (qn := quantile(n)) is not None and abs(qn - q) <= 0.05 * q)
            f.write(f"{x},{b},{n}\n")


if __name__ == "__main__":
    hermite()
    kummer()
    mean_fpt()
    eigen()
    truncation()
    survival()
