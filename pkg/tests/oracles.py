"""Independent brute-force reference implementations.

Plain Python loops only; nothing here calls into pvlcoe.
"""
import math


def loop_pow(x, n):
    p = 1.0
    for _ in range(n):
        p *= x
    return p


def treasury_yield(t):
    return 0.0034 * (1.2892 * math.log(t) + 2.7061) ** 3.473272 / 100


def output_sum(sdr, n, exponent="n"):
    total = 0.0
    for k in range(1, n + 1):
        total += loop_pow(1 - sdr, k if exponent == "n" else k - 1)
    return total


def cost_factor(r, dr, n, sdr):
    return loop_pow(1 + r, n) / loop_pow(1 + dr, n) / output_sum(sdr, n, "n")


def lcic(c_bom, module_life, e_rem, horizon, dr):
    total = 0.0
    k = 0
    while k * module_life <= horizon:
        total += c_bom / loop_pow(1 + dr, k * module_life)
        k += 1
    return total - c_bom * e_rem / loop_pow(1 + dr, horizon)


def level_payment(principal, r, n):
    """Payment that empties the balance after n years, by bisection."""
    def final_balance(lp):
        b = principal
        for _ in range(n):
            b = b * (1 + r) - lp
        return b

    lo, hi = 0.0, principal * (1 + r) ** n
    for _ in range(200):
        mid = (lo + hi) / 2
        if final_balance(mid) > 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def rank_rho_no_ties(xs, ys):
    n = len(xs)
    rx = {v: i + 1 for i, v in enumerate(sorted(xs))}
    ry = {v: i + 1 for i, v in enumerate(sorted(ys))}
    d2 = sum((rx[x] - ry[y]) ** 2 for x, y in zip(xs, ys))
    return 1 - 6 * d2 / (n * (n * n - 1))
