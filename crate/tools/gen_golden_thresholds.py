#!/usr/bin/env python3
"""Independent re-derivation of the threshold evaluators.

Writes crates/core/tests/golden/thresholds.json: twenty flattened threshold
reports used by the golden acceptance test. This script deliberately shares
no code with the Rust implementation; keep it that way so the comparison
stays meaningful.
"""

import json
import math
import os

LN = math.log
LOG2 = math.log2


def sqrt_or_zero(x):
    return math.sqrt(x) if x > 0 else 0.0


def clamp0(x):
    return x if x > 0 else 0.0


def npack(p, s):
    return p * (p - 1 - s) / (2 * s)


def norm_submatrix(c):
    n_r, n_c, s_r, s_c = c["n_r"], c["n_c"], c["s_r"], c["s_c"]
    if s_r >= s_c:
        return n_r, n_c, s_r, s_c
    return n_c, n_r, s_c, s_r


def evaluate(class_desc, m, eps, mu=None):
    kind = class_desc["class"]
    vals = {}
    regime = {}

    if kind == "sset":
        n, s = class_desc["n"], class_desc["s"]
        vals["sufficient.prop1"] = math.sqrt(
            2 * n / m * LN(2 * s / eps) + 2 * s / m * LN(2 * n / eps)
        )
        vals["sufficient.cass_sset"] = math.sqrt(32 * n / m * LN(2 * s / eps))
        inner = LN(s / (2 * eps)) + LN((n - s + 1) / (n + 1))
        vals["necessary_adaptive.prop11"] = sqrt_or_zero(2 * (n - s + 1) / m * inner)
        vals["necessary_nonadaptive.prop7"] = (
            math.sqrt(clamp0(1 - 2 * eps) * n / (4 * m) * LN(n - s))
            if n - s > 1
            else None
        )
        vals["sample_cap.cass_sset_cap"] = (
            2 * s * LOG2(n / (2 * s)) if n > 2 * s else None
        )
        regime["1 <= (1-2eps) * ln(n-s)"] = (
            n - s > 1 and clamp0(1 - 2 * eps) * LN(n - s) >= 1.0
        )

    elif kind == "intervals":
        n, s, k = class_desc["n"], class_desc["s"], class_desc["k"]
        vals["sufficient.prop2"] = math.sqrt(
            30 * n / (s * s * m) * LN(2 * math.sqrt(2) * k * s / eps)
        )
        vals["sufficient.prop19"] = math.sqrt(
            768 * n / (s * s * m) * LN(3 * math.sqrt(2) * k * s / eps)
        )
        vals["sufficient.prop19_text"] = math.sqrt(
            384 * n / (s * s * m) * LN(9 * k / eps)
        )
        vals["necessary_adaptive.prop12"] = (
            clamp0(1 - eps) * math.sqrt(n / (2 * s * s * m)) if k == 1 else None
        )
        span = n - s * (k - 1)
        inner = LN(k * s / (8 * eps)) + LN(span / (n + s))
        vals["necessary_adaptive.prop13"] = sqrt_or_zero(
            2 * span / (s * s * m) * inner
        )
        arg = n / s - k
        vals["necessary_nonadaptive.prop8"] = (
            math.sqrt(
                clamp0(1 - 2 * eps) * (n - (k - 1) * s) / (4 * s * s * m) * LN(arg)
            )
            if arg > 1
            else None
        )
        vals["sample_cap.prop19_cap"] = (
            3 * k * (LOG2(n / (2 * k * s)) + 1.5 * s) if n > 2 * k * s else None
        )
        regime["n / ln(4n) >= k*s^3"] = n / LN(4 * n) >= k * s**3
        regime["n > k*s^3"] = n > k * s**3

    elif kind == "stars":
        p, s, k = class_desc["p"], class_desc["s"], class_desc["k"]
        n = p * (p - 1) // 2
        if k == 1:
            vals["sufficient.prop3"] = (
                math.sqrt(16 * n / ((s - 1) ** 2 * m) * LN(4 * s / eps))
                if s > 1
                else None
            )
            vals["sufficient.cass_star"] = math.sqrt(
                392 * n / (s * s * m) * LN(9 * s / eps)
            )
        elif k < s:
            vals["sufficient.prop4"] = math.sqrt(
                16 * n / ((s - k) ** 2 * m) * LN(4 * s * k / eps)
            )
        else:
            vals["sufficient.prop4"] = None
        pack = npack(p, s)
        vals["necessary_adaptive.prop14"] = clamp0(1 - eps) * math.sqrt(
            pack / (2 * s * m)
        )
        span = pack - k + 1
        if span > 0:
            inner = LN(k * s / (8 * eps)) + LN(span / (pack + 1))
            vals["necessary_adaptive.prop15"] = (
                sqrt_or_zero(2 * span / (m / s) * inner) / s
            )
        else:
            vals["necessary_adaptive.prop15"] = None
        inner16 = LN(s / (2 * eps)) + LN((p - s) / p)
        vals["necessary_adaptive.prop16"] = sqrt_or_zero(2 * (p - s) / m * inner16)
        arg = math.sqrt(2 * n) - s - 1
        vals["necessary_nonadaptive.prop9"] = (
            math.sqrt(clamp0(1 - 2 * eps) * n / (2 * m) * LN(arg)) if arg > 1 else None
        )
        vals["sample_cap.cass_star_cap"] = (
            4 * LOG2(p / 4) + 2 * s * LOG2((p - 1) / s)
            if p > 4 and p - 1 > s
            else None
        )
        if k == 1:
            regime["sqrt(n) / ln(4n) >= s^2"] = math.sqrt(n) / LN(4 * n) >= s * s
            regime["sqrt(2n) >= s^2"] = math.sqrt(2 * n) >= s * s
        else:
            regime["k < s"] = k < s
            regime["sqrt(n) / ln(4n) >= k*(s-k)^2"] = (
                math.sqrt(n) / LN(4 * n) >= k * (s - k) ** 2
            )

    elif kind == "submatrix":
        n_r, n_c, s_r, s_c = norm_submatrix(class_desc)
        n = n_r * n_c
        s = s_r * s_c
        vals["sufficient.prop5"] = math.sqrt(8 * n / (s_r**2 * m) * LN(4 * s / eps))
        vals["sufficient.prop6"] = math.sqrt(
            10 * n / (s_c * s_r**2 * m) * LN(8 * s / eps)
        )
        vals["sufficient.prop20"] = math.sqrt(128 * n / (s_r**2 * m) * LN(2 * s / eps))
        vals["necessary_adaptive.prop17"] = clamp0(1 - eps) * math.sqrt(
            n / (2 * s * s * m)
        )
        span = n_c - s_c + 1
        inner = LN(s / (8 * eps)) + LN(span / (n_c + 1))
        vals["necessary_adaptive.prop18"] = sqrt_or_zero(2 * span / (s_r * m) * inner)
        shape = max((n_c - s_c) / (n_c * s_r), (n_r - s_r) / (n_r * s_c))
        arg = max(n_r - s_r, n_c - s_c)
        vals["necessary_nonadaptive.prop10"] = (
            math.sqrt(clamp0(1 - 2 * eps) * n / (4 * m) * shape * LN(arg))
            if arg > 1 and shape > 0
            else None
        )
        vals["sample_cap.prop20_cap"] = (
            2 * s_c * LOG2(n_c / (2 * s_c)) + 2 * s_r * LOG2(n_r / (2 * s_r))
            if n_c > 2 * s_c and n_r > 2 * s_r
            else None
        )
        regime["n_c / ln(4n) >= s_r^2 / s_c"] = n_c / LN(4 * n) >= s_r**2 / s_c
        regime["min(n_r, n_c) / ln(8n) >= s_c * s_r^2"] = (
            min(n_r, n_c) / LN(8 * n) >= s_c * s_r**2
        )
        regime["n_c > s_r^2 / s_c"] = n_c > s_r**2 / s_c

    else:
        raise ValueError(kind)

    if mu is not None:
        n_amb = {
            "sset": lambda c: c["n"],
            "intervals": lambda c: c["n"],
            "stars": lambda c: c["p"] * (c["p"] - 1) // 2,
            "submatrix": lambda c: c["n_r"] * c["n_c"],
        }[kind](class_desc)
        s_amb = {
            "sset": lambda c: c["s"],
            "intervals": lambda c: c["s"] * c["k"],
            "stars": lambda c: c["s"] * c["k"],
            "submatrix": lambda c: c["s_r"] * c["s_c"],
        }[kind](class_desc)
        denom = LN(mu * mu * m / n_amb + 1)
        vals["sample_lower.lemma10"] = (
            s_amb * LN(n_amb / s_amb) / denom if denom > 0 else None
        )

    report = {"class": class_desc, "m": m, "epsilon": eps, "values": vals, "regime": regime}
    if mu is not None:
        report["mu"] = mu
    return report


CASES = [
    ({"class": "sset", "n": 1024, "s": 4}, 1024.0, 0.1, None),
    ({"class": "sset", "n": 512, "s": 2}, 512.0, 0.1, 2.0),
    ({"class": "sset", "n": 4096, "s": 16}, 2048.0, 0.05, None),
    ({"class": "sset", "n": 100, "s": 5}, 50.0, 0.2, None),
    ({"class": "sset", "n": 65536, "s": 8}, 65536.0, 0.01, 1.0),
    ({"class": "intervals", "n": 8192, "s": 8, "k": 1}, 8192.0, 0.1, None),
    ({"class": "intervals", "n": 65536, "s": 8, "k": 2}, 65536.0, 0.1, None),
    ({"class": "intervals", "n": 4096, "s": 16, "k": 1}, 1024.0, 0.05, 3.0),
    ({"class": "intervals", "n": 1024, "s": 4, "k": 4}, 4096.0, 0.2, None),
    ({"class": "intervals", "n": 131072, "s": 8, "k": 1}, 131072.0, 0.1, None),
    ({"class": "stars", "p": 64, "s": 4, "k": 1}, 2016.0, 0.1, None),
    ({"class": "stars", "p": 128, "s": 4, "k": 1}, 8128.0, 0.1, 3.0),
    ({"class": "stars", "p": 32, "s": 3, "k": 2}, 496.0, 0.1, None),
    ({"class": "stars", "p": 256, "s": 8, "k": 1}, 32640.0, 0.05, None),
    ({"class": "stars", "p": 16, "s": 2, "k": 1}, 120.0, 0.2, None),
    ({"class": "submatrix", "n_r": 64, "n_c": 64, "s_r": 4, "s_c": 4}, 4096.0, 0.1, None),
    ({"class": "submatrix", "n_r": 256, "n_c": 256, "s_r": 2, "s_c": 2}, 65536.0, 0.1, 1.5),
    ({"class": "submatrix", "n_r": 32, "n_c": 16, "s_r": 2, "s_c": 4}, 512.0, 0.1, None),
    ({"class": "submatrix", "n_r": 128, "n_c": 64, "s_r": 8, "s_c": 2}, 8192.0, 0.05, None),
    ({"class": "submatrix", "n_r": 100, "n_c": 50, "s_r": 5, "s_c": 3}, 5000.0, 0.1, None),
]


def main():
    reports = [evaluate(c, m, eps, mu) for (c, m, eps, mu) in CASES]
    out = os.path.join(
        os.path.dirname(__file__), "..", "crates", "core", "tests", "golden",
        "thresholds.json",
    )
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w") as f:
        json.dump(reports, f, indent=1, sort_keys=True)
        f.write("\n")
    print(f"wrote {len(reports)} reports to {out}")


if __name__ == "__main__":
    main()
