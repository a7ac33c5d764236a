#!/usr/bin/env python3
# Independent high-precision evaluation of the closed-form bounds.
# Values printed here are frozen into tests/bounds_test.cpp and the
# acceptance suite.
import mpmath as mp

mp.mp.dps = 60
log2 = lambda x: mp.log(x, 2)


def dstar(J, W):
    e = mp.e
    inner = log2(e * 2 * (J + 1) * W)
    val = J + (J + 1) * W**2 * log2(e * 4 * (J + 1) * W * inner)
    return val, int(mp.ceil(val))


def vc_pathways(d, n, L):
    second = 0 if L == 1 else 2 * (n + 1) * (L - 1) * log2(3 * L - 3)
    val = 8 * L * log2(max(2, L)) ** 2 * max(mp.mpf(d), second)
    return val, int(mp.ceil(val))


def tree_counts_enumerated(v, h):
    # breadth-first expansion of a complete v-ary tree
    level, leaves, nodes = 1, 0, 0
    for depth in range(h + 1):
        nodes += level
        if depth == h:
            leaves = level
        level *= v
    return leaves, nodes


def height_bound(C, ratio, v):
    return int(mp.ceil(mp.log(C, v) * (1 + log2(ratio))))


if __name__ == "__main__":
    for J in range(1, 5):
        for W in range(1, 9):
            val, c = dstar(J, W)
            print(f"dstar J={J} W={W} raw={mp.nstr(val, 20)} ceil={c}")
    for (d, n, L) in [(1, 1, 1), (5, 3, 1), (1, 1, 2), (62, 1, 4), (10, 2, 16)]:
        val, c = vc_pathways(d, n, L)
        print(f"vc d={d} n={n} L={L} raw={mp.nstr(val, 20)} ceil={c}")
    for (v, h) in [(2, 3), (3, 0), (2, 10), (16, 64)]:
        print(f"tree v={v} h={h} ->", tree_counts_enumerated(v, h))
    print("height C=4 ratio=2 v=2 ->", height_bound(4, 2, 2))
    print("height C=2 ratio=1 v=2 ->", height_bound(2, 1, 2))
    print("delta n=m=1 alpha=.5 eps=1:", mp.nstr((1 / mp.mpf(131)) ** 2 / 2, 20))
