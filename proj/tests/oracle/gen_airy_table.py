#!/usr/bin/env python3
"""Reference table (x, Ai, Ai') for the specialfun tests.

Values for |x| <= 12 come from the Maclaurin series summed at 80 significant
digits, with Ai(0) and Ai'(0) taken from exact Gamma-function expressions.
Points beyond that use mpmath.airyai, checked against the series where both
apply. Output is printed with 25 significant digits.
"""
import mpmath as mp

mp.mp.dps = 80


def airy_series(x):
    x = mp.mpf(x)
    a0 = 1 / (mp.power(3, mp.mpf(2) / 3) * mp.gamma(mp.mpf(2) / 3))
    a1 = -1 / (mp.power(3, mp.mpf(1) / 3) * mp.gamma(mp.mpf(1) / 3))
    coeffs = [a0, a1, mp.mpf(0)]
    ai = a0 + a1 * x
    dai = a1
    k = 0
    scale = mp.mpf(10) ** (-70)
    small = 0
    while True:
        ck = coeffs[k] / ((k + 3) * (k + 2))
        coeffs.append(ck)
        term = ck * x ** (k + 3)
        dterm = (k + 3) * ck * x ** (k + 2)
        ai += term
        dai += dterm
        k += 1
        small = small + 1 if abs(term) < scale and abs(dterm) < scale else 0
        if k > 30 and small >= 3:
            break
    return ai, dai


def main():
    xs = [mp.mpf(i) / 4 for i in range(-48, 49)]
    xs += [mp.mpf(v) for v in ("0.1", "-0.37", "1.9", "-5.55", "7.77", "-9.91",
                               "10.1", "-10.2", "11.3", "-11.8")]
    far = [mp.mpf(v) for v in ("-200", "-120.5", "-50", "-30.25", "-20", "-14",
                               "14", "20", "30", "50")]
    print("x,ai,ai_prime")
    for x in sorted(xs):
        ai, dai = airy_series(x)
        ref, dref = mp.airyai(x), mp.airyai(x, derivative=1)
        assert abs(ai - ref) <= mp.mpf(10) ** -40 * max(1, abs(ref))
        assert abs(dai - dref) <= mp.mpf(10) ** -40 * max(1, abs(dref))
        print(f"{mp.nstr(x, 12)},{mp.nstr(ai, 25)},{mp.nstr(dai, 25)}")
    for x in far:
        print(f"{mp.nstr(x, 12)},{mp.nstr(mp.airyai(x), 25)},"
              f"{mp.nstr(mp.airyai(x, derivative=1), 25)}")


if __name__ == "__main__":
    main()
