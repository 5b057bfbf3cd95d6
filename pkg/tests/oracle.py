"""High-precision direct evaluation of the defining sums (test oracle only)."""
from mpmath import log, mp, mpf

mp.dps = 40


def _m(v):
    return [mpf(float(x)) for x in v]


def H(p):
    return -sum(x * log(x) for x in _m(p) if x > 0)


def KL(p, q):
    return sum(a * log(a / b) for a, b in zip(_m(p), _m(q)) if a > 0)


def mix(p, q, a):
    a = mpf(a)
    return [(1 - a) * x + a * y for x, y in zip(_m(p), _m(q))]


def JS(p, q):
    return (KL(p, mix(p, q, 0.5)) + KL(q, mix(p, q, 0.5))) / 2


def skew_jensen(F, p, q, a):
    a = mpf(a)
    return sum((1 - a) * F(x) + a * F(y) - F((1 - a) * x + a * y)
               for x, y in zip(_m(p), _m(q))) / (a * (1 - a))


def sym_skew_jensen(F, p, q, a):
    return (skew_jensen(F, p, q, a) + skew_jensen(F, q, p, a)) / 2


def xlogx(x):
    return x * log(x) if x > 0 else mpf(0)
