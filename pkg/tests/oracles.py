"""Slow, independent reference computations used by the tests.

Nothing here imports the code under test beyond plain data containers.
"""

import itertools
import math
from collections import Counter

import numpy as np

DIRECTIONS = {0: (1, 0), 45: (1, -1), 90: (0, -1), 135: (-1, -1)}


def brute_force_tscm(levels, inside, G, d, theta):
    """Directed pair counts by visiting every voxel and every channel."""
    ux, uy = DIRECTIONS[theta]
    dx, dy = ux * d, uy * d
    n_ch, nx, ny, nz = levels.shape
    raw = [[0] * G for _ in range(G)]
    for z in range(nz):
        for y in range(ny):
            for x in range(nx):
                if not inside[x, y, z]:
                    continue
                x2, y2 = x + dx, y + dy
                if not (0 <= x2 < nx and 0 <= y2 < ny) or not inside[x2, y2, z]:
                    continue
                for r in range(n_ch):
                    raw[levels[r, x, y, z] - 1][levels[r, x2, y2, z] - 1] += 1
    return np.array(raw, dtype=np.int64)


def _h(probs):
    return -sum(p * math.log2(p) for p in probs if p > 0)


def naive_haralick(P):
    """All 22 statistics with explicit double loops over 1-based indices."""
    P = [list(map(float, row)) for row in np.asarray(P)]
    G = len(P)
    s = sum(map(sum, P))
    P = [[v / s for v in row] for row in P]
    px = [sum(P[i][j] for j in range(G)) for i in range(G)]
    py = [sum(P[i][j] for i in range(G)) for j in range(G)]
    mux = sum((i + 1) * px[i] for i in range(G))
    muy = sum((j + 1) * py[j] for j in range(G))
    sx = math.sqrt(sum(((i + 1) - mux) ** 2 * px[i] for i in range(G)))
    sy = math.sqrt(sum(((j + 1) - muy) ** 2 * py[j] for j in range(G)))

    psum = [0.0] * (2 * G + 1)  # index k = i + j, 1-based levels
    pdiff = [0.0] * G
    cells = [(i, j) for i in range(G) for j in range(G)]
    for i, j in cells:
        psum[(i + 1) + (j + 1)] += P[i][j]
        pdiff[abs(i - j)] += P[i][j]
    sa = sum(k * psum[k] for k in range(2, 2 * G + 1))
    da = sum(k * pdiff[k] for k in range(G))

    hxy = _h(P[i][j] for i, j in cells)
    hx, hy = _h(px), _h(py)
    hxy1 = -sum(P[i][j] * math.log2(px[i] * py[j]) for i, j in cells if P[i][j] > 0)
    hxy2 = _h(px[i] * py[j] for i, j in cells)

    # Q(i, j) = sum_k p(i,k) p(j,k) / (px(i) py(k)) over occupied rows/cols
    rows = [i for i in range(G) if px[i] > 0]
    cols = [k for k in range(G) if py[k] > 0]
    Q = np.array([[sum(P[i][k] * P[j][k] / (px[i] * py[k]) for k in cols) for j in rows] for i in rows])
    if len(rows) >= 2 and len(cols) >= 2:
        ev = sorted(np.linalg.eigvals(Q).real, reverse=True)
        mcc = math.sqrt(max(ev[1], 0.0))
    else:
        mcc = 0.0

    def S(f):
        return sum(f(i + 1, j + 1) * P[i][j] for i, j in cells)

    return {
        "energy": sum(P[i][j] ** 2 for i, j in cells),
        "contrast": S(lambda i, j: (i - j) ** 2),
        "correlation": S(lambda i, j: (i - mux) * (j - muy)) / (sx * sy) if sx * sy > 0 else 1.0,
        "sum_of_squares_variance": S(lambda i, j: (i - mux) ** 2),
        "homogeneity1": S(lambda i, j: 1 / (1 + abs(i - j))),
        "homogeneity2": S(lambda i, j: 1 / (1 + (i - j) ** 2)),
        "sum_average": sa,
        "sum_variance": sum((k - sa) ** 2 * psum[k] for k in range(2, 2 * G + 1)),
        "sum_entropy": _h(psum),
        "entropy": hxy,
        "difference_variance": sum((k - da) ** 2 * pdiff[k] for k in range(G)),
        "difference_entropy": _h(pdiff),
        "imc1": (hxy - hxy1) / max(hx, hy) if max(hx, hy) > 0 else 0.0,
        # natural-log form of the second information measure
        "imc2": math.sqrt(max(0.0, 1 - math.exp(-2 * (hxy2 - hxy) * math.log(2)))),
        "max_correlation_coefficient": mcc,
        "autocorrelation": S(lambda i, j: i * j),
        "dissimilarity": S(lambda i, j: abs(i - j)),
        "cluster_shade": S(lambda i, j: (i + j - mux - muy) ** 3),
        "cluster_prominence": S(lambda i, j: (i + j - mux - muy) ** 4),
        "max_probability": max(P[i][j] for i, j in cells),
        "inverse_difference_normalized": S(lambda i, j: 1 / (1 + abs(i - j) / G)),
        "inverse_difference_moment_normalized": S(lambda i, j: 1 / (1 + (i - j) ** 2 / G**2)),
    }


def table_entropy(rows, cols):
    """Entropy in bits of the empirical joint distribution of ``rows[:, cols]``."""
    counts = Counter(tuple(r[c] for c in cols) for r in rows)
    n = sum(counts.values())
    return _h(c / n for c in counts.values())


def table_mutual_information(rows, cols=(0, 1)):
    """Two-variable MI from an explicit probability table."""
    n = len(rows)
    joint = Counter((r[cols[0]], r[cols[1]]) for r in rows)
    a = Counter(r[cols[0]] for r in rows)
    b = Counter(r[cols[1]] for r in rows)
    return sum(
        (c / n) * math.log2((c / n) / ((a[x] / n) * (b[y] / n))) for (x, y), c in joint.items()
    )


def pairwise_auc(scores, positives):
    """Mann-Whitney AUC by looping over every positive/negative pair."""
    pos = [s for s, p in zip(scores, positives) if p]
    neg = [s for s, p in zip(scores, positives) if not p]
    credit = 0.0
    for a in pos:
        for b in neg:
            credit += 1.0 if a > b else 0.5 if a == b else 0.0
    return credit / (len(pos) * len(neg))


def mp_welch_p(a, b, dps=50):
    """Two-sided Welch p-value evaluated in mpmath at ``dps`` digits."""
    import mpmath

    with mpmath.workdps(dps):
        a = [mpmath.mpf(float(v)) for v in a]
        b = [mpmath.mpf(float(v)) for v in b]
        na, nb = len(a), len(b)
        ma, mb = sum(a) / na, sum(b) / nb
        va = sum((v - ma) ** 2 for v in a) / (na - 1) / na
        vb = sum((v - mb) ** 2 for v in b) / (nb - 1) / nb
        t = (ma - mb) / mpmath.sqrt(va + vb)
        df = (va + vb) ** 2 / (va**2 / (na - 1) + vb**2 / (nb - 1))
        x = df / (df + t * t)
        p = mpmath.betainc(df / 2, mpmath.mpf(1) / 2, 0, x, regularized=True)
        return float(p)


def qp_dual_objective(X, y, C):
    """Optimal SVM dual objective ``sum(a) - 0.5 a'Qa`` from cvxopt's QP solver."""
    from cvxopt import matrix, solvers

    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    Q = (y[:, None] * y[None, :]) * (X @ X.T)
    P = matrix(Q + 1e-14 * np.eye(n))
    q = matrix(-np.ones(n))
    Gm = matrix(np.vstack([-np.eye(n), np.eye(n)]))
    h = matrix(np.hstack([np.zeros(n), C * np.ones(n)]))
    A = matrix(y.reshape(1, -1))
    b = matrix(0.0)
    opts = {"show_progress": False, "abstol": 1e-12, "reltol": 1e-12, "feastol": 1e-12, "maxiters": 200}
    sol = solvers.qp(P, q, Gm, h, A, b, options=opts)
    a = np.array(sol["x"]).ravel()
    return float(a.sum() - 0.5 * a @ Q @ a)


def s_curve(n=12):
    """``n`` points equally spaced in arc length along an S of two semicircles.

    Returns the points (3-D, z = 0) in arc-length order.
    """
    total = 2 * math.pi
    pts = []
    for s in np.linspace(0.0, total, n):
        if s <= math.pi:
            ang = math.pi / 2 + s  # upper circle, counter-clockwise from the top
            pts.append((math.cos(ang), 1 + math.sin(ang), 0.0))
        else:
            ang = math.pi / 2 - (s - math.pi)  # lower circle, clockwise from the join
            pts.append((math.cos(ang), -1 + math.sin(ang), 0.0))
    return np.array(pts)


def all_subsets(n, max_size):
    return [c for k in range(1, max_size + 1) for c in itertools.combinations(range(n), k)]
