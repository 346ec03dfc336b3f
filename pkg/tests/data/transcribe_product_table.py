"""Hand transcription of the product-state factorization table.

Writes one line per annihilating pair, ``p1 p2`` with the sign on ``p2``,
for the periodic chain ``|1>^N`` with all stabilizer phases +1.  Rows:

    Z_n                    = (Z_n mu_{n+-1}) (mu_{n+-1})
    Z_n Z_{n+1}            = -(X_n X_{n+1}) (Y_n Y_{n+1})
                           =  (X_n Y_{n+1}) (Y_n X_{n+1})
    Z_{n-1} Z_{n+1}        =  (Z_{n-1} mu_n) (mu_n Z_{n+1})
    Z_n Z_n'               =  (Z_n) (Z_n')
    Z_n Z_n' Z_n'+1        =  (Z_n) (Z_n' Z_n'+1)
    Z_n Z_n+1 Z_n' Z_n'+1  =  (Z_n Z_n+1) (Z_n' Z_n'+1)

Only plain text is produced here; the package is not imported.

Usage: python3 transcribe_product_table.py N > table_product_nN.txt
"""

import sys


def text(n, ops, sign=""):
    chars = ["I"] * n
    for s, c in ops.items():
        chars[s % n] = c
    return sign + "".join(chars)


def order_key(t):
    body = t.lstrip("+-")
    return (sum(c != "I" for c in body), body)


def canonical(a, b):
    """Sort the unordered pair; the sign rides on the second factor."""
    sa = a.startswith("-")
    sb = b.startswith("-")
    a, b = a.lstrip("-"), b.lstrip("-")
    neg = sa ^ sb
    if order_key(b) < order_key(a):
        a, b = b, a
    return a, ("-" if neg else "") + b


def rows(n):
    out = set()
    for k in range(n):
        for d in (1, -1):
            for mu in "XYZ":
                out.add(canonical(text(n, {k: "Z", k + d: mu}), text(n, {k + d: mu})))
        out.add(canonical(text(n, {k: "X", k + 1: "X"}), text(n, {k: "Y", k + 1: "Y"}, "-")))
        out.add(canonical(text(n, {k: "X", k + 1: "Y"}), text(n, {k: "Y", k + 1: "X"})))
        for mu in "XYZ":
            out.add(canonical(text(n, {k - 1: "Z", k: mu}), text(n, {k: mu, k + 1: "Z"})))
    for a in range(n):
        for b in range(n):
            if a != b:
                out.add(canonical(text(n, {a: "Z"}), text(n, {b: "Z"})))
            if a not in (b % n, (b + 1) % n):
                out.add(canonical(text(n, {a: "Z"}), text(n, {b: "Z", b + 1: "Z"})))
            if len({a % n, (a + 1) % n, b % n, (b + 1) % n}) == 4:
                out.add(canonical(text(n, {a: "Z", a + 1: "Z"}), text(n, {b: "Z", b + 1: "Z"})))
    return sorted(out, key=lambda p: (order_key(p[0]), order_key(p[1]), p))


if __name__ == "__main__":
    n = int(sys.argv[1])
    print(f"# product state |1>^{n}, periodic chain, l = 2, b = 2")
    for a, b in rows(n):
        print(a, b)
