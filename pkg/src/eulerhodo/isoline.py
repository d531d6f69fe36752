"""Zero-level-set extraction on regular lattices.

2D: marching squares with the ambiguous saddle cases resolved by a center
sample, followed by per-edge bisection so every emitted vertex sits on the
zero set to a requested tolerance (plain linear interpolation would not).
3D: sign-change cells plus bisection-refined edge crossings, returned as a
point cloud (membership and emptiness queries need points, not meshes).
"""

from __future__ import annotations

import numpy as np

# Per marching-squares case: list of (edge, edge) segments.  Edges are
# 'b'ottom, 'r'ight, 't'op, 'l'eft of the cell; corner bit order is
# (i,j), (i+1,j), (i+1,j+1), (i,j+1).  Cases 5 and 10 are saddles.
_CASES = {
    0: [],
    1: [("l", "b")],
    2: [("b", "r")],
    3: [("l", "r")],
    4: [("r", "t")],
    6: [("b", "t")],
    7: [("l", "t")],
    8: [("t", "l")],
    9: [("b", "t")],
    11: [("r", "t")],
    12: [("l", "r")],
    13: [("b", "r")],
    14: [("l", "b")],
    15: [],
}


def bisect_edge(g, pa, pb, va, vb, tol, max_iter=80):
    """Root of g on the segment [pa, pb]; va, vb must straddle zero."""
    if va == 0.0:
        return np.asarray(pa, dtype=float)
    if vb == 0.0:
        return np.asarray(pb, dtype=float)
    pa = np.asarray(pa, dtype=float)
    pb = np.asarray(pb, dtype=float)
    for _ in range(max_iter):
        pm = 0.5 * (pa + pb)
        vm = g(pm)
        if abs(vm) <= tol or np.all(pa == pb):
            return pm
        if (vm > 0.0) == (va > 0.0):
            pa, va = pm, vm
        else:
            pb, vb = pm, vm
    return 0.5 * (pa + pb)


def _edge_nodes(edge, i, j):
    if edge == "b":
        return (i, j), (i + 1, j)
    if edge == "t":
        return (i, j + 1), (i + 1, j + 1)
    if edge == "l":
        return (i, j), (i, j + 1)
    return (i + 1, j), (i + 1, j + 1)  # 'r'


def _edge_key(edge, i, j):
    a, b = _edge_nodes(edge, i, j)
    return (a, b) if a <= b else (b, a)


def marching_squares(values, xs, ys, g, tol):
    """Polylines of {g = 0} with bisection-refined vertices.

    ``values`` are g sampled at the lattice (len(xs), len(ys)); ``g`` is
    the scalar field used for refinement and saddle disambiguation.
    Returns (polylines, cells): arrays of refined vertices (closed loops
    repeat their first vertex) and the index pairs of sign-change cells.
    """
    nx, ny = values.shape
    pos = values > 0.0
    point_of: dict = {}
    segments = []
    cells = []

    def refined_point(edge, i, j):
        key = _edge_key(edge, i, j)
        if key not in point_of:
            (ia, ja), (ib, jb) = key
            pa = np.array([xs[ia], ys[ja]])
            pb = np.array([xs[ib], ys[jb]])
            point_of[key] = bisect_edge(g, pa, pb, values[ia, ja], values[ib, jb], tol)
        return key

    for i in range(nx - 1):
        for j in range(ny - 1):
            idx = (
                int(pos[i, j])
                | int(pos[i + 1, j]) << 1
                | int(pos[i + 1, j + 1]) << 2
                | int(pos[i, j + 1]) << 3
            )
            if idx in (0, 15):
                continue
            cells.append((i, j))
            if idx == 5:
                center = g(np.array([0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])]))
                pairs = [("b", "r"), ("t", "l")] if center > 0 else [("b", "l"), ("r", "t")]
            elif idx == 10:
                center = g(np.array([0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])]))
                pairs = [("b", "l"), ("r", "t")] if center > 0 else [("b", "r"), ("t", "l")]
            else:
                pairs = _CASES[idx]
            for ea, eb in pairs:
                segments.append((refined_point(ea, i, j), refined_point(eb, i, j)))

    polylines = _stitch(segments, point_of)
    return polylines, cells


def _stitch(segments, point_of):
    """Chain segments sharing edge keys into polylines."""
    neighbors: dict = {}
    for s, (a, b) in enumerate(segments):
        neighbors.setdefault(a, []).append((s, b))
        neighbors.setdefault(b, []).append((s, a))
    used = [False] * len(segments)
    polylines = []
    for s0, (a0, b0) in enumerate(segments):
        if used[s0]:
            continue
        used[s0] = True
        chain = [a0, b0]
        for grow_end in (True, False):
            while True:
                tip = chain[-1] if grow_end else chain[0]
                nxt = None
                for s, other in neighbors.get(tip, ()):
                    if not used[s]:
                        nxt = (s, other)
                        break
                if nxt is None:
                    break
                used[nxt[0]] = True
                if grow_end:
                    chain.append(nxt[1])
                else:
                    chain.insert(0, nxt[1])
            if chain[0] == chain[-1]:
                break  # closed loop
        polylines.append(np.array([point_of[k] for k in chain]))
    return polylines


def det_stack(A: np.ndarray) -> np.ndarray:
    """Determinant over the two leading axes of an (n, n) + S array."""
    n = A.shape[0]
    if n == 1:
        return A[0, 0]
    if n == 2:
        return A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if n == 3:
        return (
            A[0, 0] * (A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
            - A[0, 1] * (A[1, 0] * A[2, 2] - A[1, 2] * A[2, 0])
            + A[0, 2] * (A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0])
        )
    return np.linalg.det(np.moveaxis(A, (0, 1), (-2, -1)))


_CUBE_EDGES = [
    ((0, 0, 0), (1, 0, 0)), ((0, 1, 0), (1, 1, 0)), ((0, 0, 1), (1, 0, 1)),
    ((0, 1, 1), (1, 1, 1)), ((0, 0, 0), (0, 1, 0)), ((1, 0, 0), (1, 1, 0)),
    ((0, 0, 1), (0, 1, 1)), ((1, 0, 1), (1, 1, 1)), ((0, 0, 0), (0, 0, 1)),
    ((1, 0, 0), (1, 0, 1)), ((0, 1, 0), (0, 1, 1)), ((1, 1, 0), (1, 1, 1)),
]


def sign_change_cells_3d(values, axes, g, tol):
    """Cells of a 3D lattice crossed by {g = 0}, with refined edge points."""
    pos = values > 0.0
    nx, ny, nz = values.shape
    cells = []
    point_of: dict = {}
    csum = (
        pos[:-1, :-1, :-1].astype(int) + pos[1:, :-1, :-1] + pos[:-1, 1:, :-1]
        + pos[:-1, :-1, 1:] + pos[1:, 1:, :-1] + pos[1:, :-1, 1:]
        + pos[:-1, 1:, 1:] + pos[1:, 1:, 1:]
    )
    mixed = (csum > 0) & (csum < 8)
    for i, j, k in zip(*np.nonzero(mixed)):
        cells.append((int(i), int(j), int(k)))
        for da, db in _CUBE_EDGES:
            na = (i + da[0], j + da[1], k + da[2])
            nb = (i + db[0], j + db[1], k + db[2])
            if pos[na] == pos[nb]:
                continue
            key = (na, nb)
            if key in point_of:
                continue
            pa = np.array([axes[0][na[0]], axes[1][na[1]], axes[2][na[2]]])
            pb = np.array([axes[0][nb[0]], axes[1][nb[1]], axes[2][nb[2]]])
            point_of[key] = bisect_edge(g, pa, pb, values[na], values[nb], tol)
    points = np.array(list(point_of.values())) if point_of else np.empty((0, 3))
    return cells, points


def point_in_polylines(point, polylines) -> bool:
    """Even-odd ray-casting test against a set of closed polylines."""
    x, y = float(point[0]), float(point[1])
    inside = False
    for poly in polylines:
        for (x0, y0), (x1, y1) in zip(poly[:-1], poly[1:]):
            if (y0 > y) != (y1 > y):
                x_cross = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
                if x_cross > x:
                    inside = not inside
    return inside
