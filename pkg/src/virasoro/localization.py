"""Localization densities for SLE-type measures on multiply-connected grids.

The canonical density against chordal SLE on a tube D inside a surface Sigma
is  phi_D(gamma) = H_D(X,Y)^h exp(-(c/2) nu_Sigma(gamma; Sigma \\ D)), with
the Brownian loop measure replaced by the exact discrete random-walk loop
measure and H by the discrete excursion kernel.  The consistency condition
between nested tubes is then an exact identity of log-determinants, and the
disintegration of the measure through a stopped initial segment can be
tested by Monte Carlo against loop-erased-walk references, which have the
required domain Markov property.
"""

from __future__ import annotations

import math

import numpy as np

from .gridloops import (
    GridDomain,
    discrete_excursion_kernel,
    loop_mass_two_sets,
)
from .sle import SLEParams, make_rng

_STEPS = ((1, 0), (-1, 0), (0, 1), (0, -1))


# -- localization weights ----------------------------------------------------------


def localization_weight(sigma: GridDomain, tube, gamma, X, Y, params: SLEParams):
    """phi_D(gamma) = H_D(X,Y)^h exp(-(c/2) nu_Sigma(gamma; Sigma \\ D))."""
    tube = {tuple(v) for v in tube}
    gamma = [tuple(v) for v in gamma]
    if any(v not in tube for v in gamma):
        raise ValueError("trace must lie inside the tube")
    D = GridDomain(v for v in sigma.vertices if v in tube)
    H = discrete_excursion_kernel(D, X, Y)
    outside = [v for v in sigma.vertices if v not in tube]
    nu = loop_mass_two_sets(sigma, gamma, outside)
    c = float(params.c)
    return H ** float(params.h) * math.exp(-(c / 2.0) * nu)


def consistency_residual(sigma: GridDomain, D, Dp, gamma, X, Y, params: SLEParams):
    """Two routes to phi_{D'}/phi_D; returns |log lhs - log rhs|.

    lhs: ratio of the defining densities.  rhs: the restriction form
    (H_D/H_{D'})^{-h} exp(-(c/2) nu_D(gamma; D \\ D')).  Equality is the
    consistency condition for nested tubes, exact up to rounding by loop-mass
    additivity and the restriction property of the discrete loop measure.
    """
    D = {tuple(v) for v in D}
    Dp = {tuple(v) for v in Dp}
    if not Dp <= D:
        raise ValueError("tubes must be nested")
    h = float(params.h)
    c = float(params.c)
    lhs = math.log(localization_weight(sigma, Dp, gamma, X, Y, params)) - math.log(
        localization_weight(sigma, D, gamma, X, Y, params)
    )
    Ddom = GridDomain(v for v in sigma.vertices if v in D)
    Dpdom = GridDomain(v for v in sigma.vertices if v in Dp)
    HD = discrete_excursion_kernel(Ddom, X, Y)
    HDp = discrete_excursion_kernel(Dpdom, X, Y)
    nuD = loop_mass_two_sets(Ddom, gamma, [v for v in Ddom.vertices if v not in Dp])
    rhs = h * (math.log(HDp) - math.log(HD)) - (c / 2.0) * nuD
    return abs(lhs - rhs)


def multi_sle_interaction(sigma: GridDomain, traces, params: SLEParams):
    """exp((c/2) sum_{j>=2} nu_Sigma(gamma_j; union_{i<j} gamma_i)).

    Raises on intersecting traces; equals 1 for a single trace or c = 0.
    """
    traces = [[tuple(v) for v in g] for g in traces]
    seen = set()
    for g in traces:
        s = set(g)
        if s & seen:
            raise ValueError("traces must be disjoint")
        seen |= s
    J = pairwise_mass_sum(sigma, traces)
    return math.exp(float(params.c) / 2.0 * J)


def pairwise_mass_sum(sigma: GridDomain, traces):
    """sum_{j>=2} nu_Sigma(gamma_j; union_{i<j} gamma_i)."""
    total = 0.0
    acc = []
    for j, g in enumerate(traces):
        if j > 0:
            total += loop_mass_two_sets(sigma, g, acc)
        acc.extend(g)
    return total


def telescoped_mass_sum(sigma: GridDomain, traces, tubes):
    """sum_i nu(gamma_i; Sigma \\ D_i) - nu(union gamma_i; Sigma \\ union D_i).

    Equal to pairwise_mass_sum for any disjoint tubes D_i containing the
    traces (the choice drops out).
    """
    total = 0.0
    union_traces = []
    union_tubes = set()
    for g, tube in zip(traces, tubes):
        tube = {tuple(v) for v in tube}
        if any(tuple(v) not in tube for v in g):
            raise ValueError("each trace must lie in its tube")
        total += loop_mass_two_sets(sigma, g, [v for v in sigma.vertices if v not in tube])
        union_traces.extend(g)
        union_tubes |= tube
    total -= loop_mass_two_sets(
        sigma, union_traces, [v for v in sigma.vertices if v not in union_tubes]
    )
    return total


# -- path generation ----------------------------------------------------------------


def winding_number(path, center):
    """Winding of a closed-up lattice path around a center point."""
    cx, cy = center
    total = 0.0
    pts = [complex(x - cx, y - cy) for (x, y) in path]
    for a, b in zip(pts, pts[1:]):
        total += math.atan2((a.real * b.imag - a.imag * b.real), (a.real * b.real + a.imag * b.imag))
    return total / (2 * math.pi)


def conditioned_green(domain: GridDomain, target):
    """Harmonic h(v) = P_v[first exit of the domain is at the target vertex]."""
    G, verts = domain.green_matrix()
    idx = {v: i for i, v in enumerate(verts)}
    tx, ty = target
    h = np.zeros(len(verts))
    for dx, dy in _STEPS:
        i = idx.get((tx + dx, ty + dy))
        if i is not None:
            h += G[:, i] * 0.25
    return h, idx


def lerw_sample(domain: GridDomain, start, target, rng):
    """Loop-erased random walk from start to the exterior target vertex.

    ``start`` may be an exterior boundary vertex (the walk enters through a
    harmonic-measure-weighted interior neighbour) or an interior vertex.
    Returns the loop-erased interior path (tuple of vertices).
    """
    h, idx = conditioned_green(domain, target)
    start = tuple(start)
    target = tuple(target)

    def neighbours(v):
        out = []
        x, y = v
        for dx, dy in _STEPS:
            w = (x + dx, y + dy)
            if w in idx:
                out.append((w, h[idx[w]]))
            elif w == target:
                out.append((w, 1.0))
        return out

    if start in idx:
        current = start
        path = [start]
    else:
        opts = [(w, hw) for (w, hw) in neighbours(start) if w != target]
        if not opts:
            raise ValueError("start has no interior neighbour")
        ws = np.array([hw for (_, hw) in opts])
        current = opts[rng.choice(len(opts), p=ws / ws.sum())][0]
        path = [current]
    pos = {current: 0}
    while True:
        opts = neighbours(current)
        ws = np.array([hw for (_, hw) in opts])
        nxt = opts[rng.choice(len(opts), p=ws / ws.sum())][0]
        if nxt == target:
            return tuple(path)
        if nxt in pos:
            k = pos[nxt]
            for v in path[k + 1 :]:
                del pos[v]
            del path[k + 1 :]
            current = nxt
        else:
            path.append(nxt)
            pos[nxt] = len(path) - 1
            current = nxt


def _dilate(vertices, radius):
    out = set()
    for (x, y) in vertices:
        for dx in range(-radius, radius + 1):
            for dy in range(-radius, radius + 1):
                out.add((x + dx, y + dy))
    return out


def default_annulus_marks(sigma: GridDomain):
    """Boundary points (X, Y) on the outer left/right edges of a square annulus."""
    xs = [v[0] for v in sigma.vertices]
    ys = [v[1] for v in sigma.vertices]
    ymid = (min(ys) + max(ys)) // 2
    X = (min(xs) - 1, ymid)
    Y = (max(xs) + 1, ymid)
    return X, Y


def random_tube_pair(sigma: GridDomain, rng):
    """A random trace with nested tubes gamma subset D' subset D on an annulus.

    D is the annulus minus a radial cut on the far side; gamma is a
    loop-erased walk from X to Y inside D; D' is a random-radius dilation of
    gamma (intersected with D, endpoints' neighbourhoods included).
    """
    X, Y = default_annulus_marks(sigma)
    ys = [v[1] for v in sigma.vertices]
    xs = [v[0] for v in sigma.vertices]
    cx = (min(xs) + max(xs)) // 2
    ytop = max(ys)
    cut = {(cx, y) for y in ys if y > ytop - (ytop - min(ys)) // 2}
    D = {v for v in sigma.vertices if v not in cut}
    Ddom = GridDomain(D)
    gamma = lerw_sample(Ddom, X, Y, rng)
    radius = int(rng.integers(1, 3))
    Dp = (_dilate(gamma, radius) | _dilate([X, Y], 2)) & D
    return D, Dp, gamma, X, Y


def random_disjoint_traces(sigma: GridDomain, rng, n_traces=3):
    """Disjoint horizontal staircase traces in separate bands of the annulus."""
    ys = sorted({v[1] for v in sigma.vertices})
    bands = [ys[i] for i in range(0, len(ys), max(1, len(ys) // n_traces))][:n_traces]
    traces = []
    for y0 in bands:
        row = sorted(v for v in sigma.vertices if v[1] == y0)
        if len(row) < 3:
            continue
        k = len(row) // 2
        trace = row[: max(2, k)]
        # keep only a connected run
        run = [trace[0]]
        for v in trace[1:]:
            if v[0] == run[-1][0] + 1:
                run.append(v)
            else:
                break
        traces.append(tuple(run))
    return traces


def disjoint_tubes(sigma: GridDomain, traces, radius=1):
    """Disjoint tubes around disjoint traces (greedy dilation)."""
    tubes = []
    used = set()
    verts = set(sigma.vertices)
    for g in traces:
        tube = (_dilate(g, radius) & verts) - used
        tube |= set(g)
        tubes.append(tube)
        used |= tube
    return tubes


# -- disintegration ------------------------------------------------------------------


def disintegration_check(
    sigma: GridDomain,
    tube,
    X,
    Y,
    params: SLEParams,
    seed,
    n_samples=200,
    stop_radius=4.0,
):
    """Total-mass consistency through a stopped initial segment.

    Route one estimates the tube-restricted mass directly: sample a
    loop-erased walk gamma from X to Y on sigma and average
    1[gamma in tube] * phi_tube(gamma).  Route two stops gamma at its first
    exit from the ball B(X, stop_radius), then independently resamples the
    continuation from the tip in the slit surface (the walk's domain Markov
    property matches the measure-level disintegration); the composed weight
    uses the exact loop-mass splitting.  Both routes estimate the same
    number; the report compares them within combined Monte Carlo error.
    """
    tube = {tuple(v) for v in tube}
    X, Y = tuple(X), tuple(Y)
    Ddom = GridDomain(v for v in sigma.vertices if v in tube)
    H = discrete_excursion_kernel(Ddom, X, Y)
    h = float(params.h)
    c = float(params.c)
    outside = [v for v in sigma.vertices if v not in tube]
    logH = h * math.log(H)

    rng1 = make_rng(seed)
    rng2 = make_rng(seed + 9173)
    w1 = np.empty(n_samples)
    w2 = np.empty(n_samples)
    for i in range(n_samples):
        gamma = lerw_sample(sigma, X, Y, rng1)
        if all(v in tube for v in gamma):
            nu = loop_mass_two_sets(sigma, gamma, outside)
            w1[i] = math.exp(logH - (c / 2.0) * nu)
        else:
            w1[i] = 0.0

        gamma2 = lerw_sample(sigma, X, Y, rng2)
        cut = len(gamma2)
        for j, v in enumerate(gamma2):
            if (v[0] - X[0]) ** 2 + (v[1] - X[1]) ** 2 > stop_radius**2:
                cut = j + 1
                break
        prefix = list(gamma2[:cut])
        if cut >= len(gamma2):
            cont = ()
        else:
            slit = sigma.subdomain(prefix[:-1])
            cont = lerw_sample(slit, prefix[-1], Y, rng2)
            # continuation starts at the tip; drop the duplicated tip vertex
            cont = tuple(v for v in cont if v != prefix[-1])
        if any(v not in tube for v in prefix) or any(v not in tube for v in cont):
            w2[i] = 0.0
            continue
        nu_pre = loop_mass_two_sets(sigma, prefix, outside)
        sig_slit = sigma.subdomain(prefix)
        nu_cont = loop_mass_two_sets(sig_slit, [v for v in cont if v in sig_slit], outside)
        w2[i] = math.exp(logH - (c / 2.0) * (nu_pre + nu_cont))

    m1, s1 = float(np.mean(w1)), float(np.std(w1, ddof=1) / math.sqrt(n_samples))
    m2, s2 = float(np.mean(w2)), float(np.std(w2, ddof=1) / math.sqrt(n_samples))
    combined = math.hypot(s1, s2)
    return {
        "one_shot": m1,
        "one_shot_stderr": s1,
        "disintegrated": m2,
        "disintegrated_stderr": s2,
        "z_score": (m1 - m2) / combined if combined else 0.0,
        "n_samples": n_samples,
    }
