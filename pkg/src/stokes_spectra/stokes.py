"""Vertical trajectories of polynomial quadratic differentials Q(z) dz^2,
Stokes complexes, and canonical topology signatures.

A vertical trajectory follows Q(z) dz^2 < 0; a Stokes line is a vertical
trajectory with at least one end at a turning point (zero of Q).  The
Stokes complex is the embedded planar graph of all Stokes lines.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import IncompleteComplexError
from .polycore import PolynomialC, roots

CAPTURE_RADIUS_REL = 1e-5
SEED_RADIUS_REL = 1e-4
STEP_TOL = 1e-9
ANGLE_TOL = 1e-3
FRAGILE_FACTOR = 10.0


def wrap_angle(a):
    """Wrap to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a


def ang_dist(a, b):
    return abs(wrap_angle(a - b))


def separation_rays(d):
    """Directions where z^(d+2) < 0: theta_k = (2k+1) pi / (d+2), sorted."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return [(2 * k + 1) * math.pi / (d + 2) for k in range(d + 2)]


class QuadDifferential:
    """Polynomial quadratic differential q(z) dz^2."""

    __slots__ = ("q",)

    def __init__(self, q):
        if not isinstance(q, PolynomialC):
            q = PolynomialC(q)
        if q.is_zero():
            raise ValueError("quadratic differential must be nonzero")
        self.q = q

    @property
    def degree(self):
        return self.q.degree

    def scale(self):
        return max(1.0, self.q.cauchy_bound())

    def escape_radius(self):
        return 10.0 * (1.0 + self.q.cauchy_bound())

    def turning_points(self):
        return roots(self.q)

    def escape_directions(self):
        """Asymptotic directions of vertical trajectories:
        arg(lead) + (deg+2) theta = pi (mod 2 pi)."""
        d = self.degree
        al = cmath.phase(self.q.coeffs[-1])
        return sorted(
            (math.pi * (2 * k + 1) - al) / (d + 2) % (2.0 * math.pi)
            for k in range(d + 2)
        )

    def local_stokes_directions(self, z0, mult):
        """The mult+2 directions of Stokes lines leaving the zero z0."""
        lead = self.q.derivative(mult)(z0) / math.factorial(mult)
        ac = cmath.phase(lead)
        return [
            (math.pi * (2 * j + 1) - ac) / (mult + 2) % (2.0 * math.pi)
            for j in range(mult + 2)
        ]


@dataclass
class Trajectory:
    points: np.ndarray
    start_kind: str  # 'turning-point' | 'interior-seed'
    end_kind: str  # 'turning-point' | 'escape' | 'unresolved'
    end_info: object  # tp index, or escape direction (radians)
    arclen: float
    min_miss: float = math.inf  # closest non-terminal turning-point approach


def trace_trajectory(Q, z0, branch=1, guard_idx=-1, direction=None,
                     start_kind="interior-seed", rec_stride=1):
    """Trace one vertical trajectory from z0.

    ``branch`` selects between the two unit directions +-i/sqrt(Q(z0))
    (principal square root); ``direction`` overrides it with an explicit
    initial heading.
    """
    if not isinstance(Q, QuadDifferential):
        Q = QuadDifferential(Q)
    tps = Q.turning_points()
    tp_pos = [z for z, _ in tps]
    scale = Q.scale()
    cap = CAPTURE_RADIUS_REL * scale
    esc = Q.escape_radius()
    max_len = 100.0 * esc

    if direction is None:
        q0 = Q.q(z0)
        if q0 == 0:
            raise ValueError("z0 is a turning point; pass an explicit direction")
        v0 = branch * 1j / cmath.sqrt(q0)
        v0 /= abs(v0)
    else:
        v0 = direction / abs(direction)

    status, z_end, v_end, hit, arclen, dists, poly = _kernels.trace_path(
        np.ascontiguousarray(Q.q.coeffs),
        complex(z0),
        complex(v0),
        np.array(tp_pos, dtype=complex),
        cap,
        esc,
        max_len,
        STEP_TOL,
        guard_idx=guard_idx,
        guard_lift_dist=2.0 * SEED_RADIUS_REL * scale,
        rec_stride=rec_stride,
    )
    if status == _kernels.STATUS_CAPTURE:
        end_kind, end_info = "turning-point", hit
    elif status == _kernels.STATUS_ESCAPE:
        dirs = Q.escape_directions()
        a = cmath.phase(z_end) % (2.0 * math.pi)
        k = min(range(len(dirs)), key=lambda i: ang_dist(a, dirs[i]))
        end_kind, end_info = "escape", dirs[k]
    else:
        end_kind, end_info = "unresolved", None

    miss = math.inf
    for i, d in enumerate(dists):
        if i == hit or i == guard_idx:
            continue
        miss = min(miss, d)
    return Trajectory(poly, start_kind, end_kind, end_info, arclen, miss)


@dataclass
class Edge:
    kind: str  # 'saddle' | 'escape' | 'unresolved' | 'loop'
    ends: tuple  # darts ((tp, j), ...) ; escape edges have one finite dart
    slot: int = -1  # escape slot index at infinity
    cross_arg: float = 0.0  # boundary-circle angle used to order within a slot
    polyline: np.ndarray = None
    fragile: bool = False


@dataclass
class StokesComplex:
    Q: QuadDifferential
    turning_points: list  # [(z, mult)]
    slots: list  # escape direction angles
    edges: list  # [Edge]
    incidence: dict  # (tp_idx, dart_j) -> edge index
    unresolved: bool = False
    fragile: bool = False
    _signature: str = field(default=None, repr=False)

    def vertex_degree(self, i):
        return self.turning_points[i][1] + 2

    def edge_counts(self):
        bounded = sum(1 for e in self.edges if e.kind in ("saddle", "loop"))
        unbounded = sum(1 for e in self.edges if e.kind == "escape")
        return bounded, unbounded


def _arrival_dart(Q, tps, hit, poly):
    """Local Stokes-direction slot through which a trajectory enters tp ``hit``."""
    z_t, mult = tps[hit]
    dirs = Q.local_stokes_directions(z_t, mult)
    z_prev = None
    for p in poly[::-1]:
        if abs(p - z_t) > 3 * CAPTURE_RADIUS_REL * Q.scale():
            z_prev = p
            break
    if z_prev is None:
        z_prev = poly[0]
    a = cmath.phase(z_prev - z_t) % (2.0 * math.pi)
    return min(range(len(dirs)), key=lambda j: ang_dist(a, dirs[j]))


def stokes_complex(Q):
    """Assemble the full Stokes complex of Q by launching the mult+2 Stokes
    lines from every turning point."""
    if not isinstance(Q, QuadDifferential):
        Q = QuadDifferential(Q)
    if Q.degree < 1:
        raise ValueError("degree must be >= 1")
    tps = Q.turning_points()
    scale = Q.scale()
    seed_r = SEED_RADIUS_REL * scale
    cap = CAPTURE_RADIUS_REL * scale
    slots = Q.escape_directions()

    edge_map = {}
    edges = []
    incidence = {}
    unresolved = False
    fragile = False

    for i, (z_t, mult) in enumerate(tps):
        for j, phi in enumerate(Q.local_stokes_directions(z_t, mult)):
            u = cmath.exp(1j * phi)
            traj = trace_trajectory(
                Q,
                z_t + seed_r * u,
                direction=u,
                guard_idx=i,
                start_kind="turning-point",
            )
            if traj.min_miss < FRAGILE_FACTOR * cap:
                fragile = True
            if traj.end_kind == "turning-point":
                k = traj.end_info
                j_arr = _arrival_dart(Q, tps, k, traj.points)
                darts = tuple(sorted(((i, j), (k, j_arr))))
                if darts in edge_map:
                    continue
                kind = "loop" if k == i else "saddle"
                e = Edge(kind, darts, polyline=traj.points)
                edge_map[darts] = len(edges)
                edges.append(e)
            elif traj.end_kind == "escape":
                z_end = traj.points[-1]
                a = cmath.phase(z_end) % (2.0 * math.pi)
                k = min(range(len(slots)), key=lambda s: ang_dist(a, slots[s]))
                e = Edge("escape", (((i, j)),), slot=k, cross_arg=a,
                         polyline=traj.points)
                edges.append(e)
            else:
                unresolved = True
                e = Edge("unresolved", (((i, j)),), polyline=traj.points)
                edges.append(e)

    for idx, e in enumerate(edges):
        if e.kind in ("saddle", "loop"):
            for dart in e.ends:
                incidence[dart] = idx
        else:
            incidence[e.ends[0]] = idx

    # every turning point of multiplicity m must carry m+2 edge ends
    for i, (z_t, mult) in enumerate(tps):
        for j in range(mult + 2):
            if (i, j) not in incidence:
                unresolved = True

    # exact saddle connections sit on the stratum where vertical topology
    # is discontinuous: carry the fragile flag, like near-misses
    if any(e.kind in ("saddle", "loop") for e in edges):
        fragile = True

    return StokesComplex(Q, tps, slots, edges, incidence, unresolved, fragile)


def _infinity_darts(S):
    """Escape edge indices in counterclockwise order at infinity, grouped
    by slot: list of (slot, [edge_idx...])."""
    by_slot = {k: [] for k in range(len(S.slots))}
    for idx, e in enumerate(S.edges):
        if e.kind == "escape":
            by_slot[e.slot].append(idx)
    out = []
    for k in range(len(S.slots)):
        lst = sorted(by_slot[k], key=lambda i: wrap_angle(S.edges[i].cross_arg - S.slots[k]))
        out.append((k, lst))
    return out


def _encode(S, rotation):
    """Deterministic string for one rotation of the infinity circle."""
    D = len(S.slots)
    inf_darts = _infinity_darts(S)
    edge_id = {}
    vertex_id = {}
    vertex_entry = {}
    queue = []
    tokens = [f"D{D}"]

    def edge_token(idx):
        if idx not in edge_id:
            edge_id[idx] = len(edge_id)
        return f"e{edge_id[idx]}"

    def register_vertex(i, entry_dart):
        if i not in vertex_id:
            vertex_id[i] = len(vertex_id)
            vertex_entry[i] = entry_dart
            queue.append(i)

    for r in range(D):
        k = (rotation + r) % D
        sl = inf_darts[k][1]
        tokens.append("|")
        for idx in sl:
            tokens.append(edge_token(idx))
            (vi, dj) = S.edges[idx].ends[0]
            register_vertex(vi, dj)

    qi = 0
    while qi < len(queue):
        v = queue[qi]
        qi += 1
        mult = S.turning_points[v][1]
        deg = mult + 2
        start = vertex_entry[v]
        block = [f"v{vertex_id[v]}(m{mult})"]
        for s in range(deg):
            dart = (v, (start + s) % deg)
            idx = S.incidence.get(dart)
            if idx is None:
                block.append("?")
                continue
            block.append(edge_token(idx))
            e = S.edges[idx]
            if e.kind in ("saddle", "loop"):
                for (vi, dj) in e.ends:
                    if (vi, dj) != dart:
                        register_vertex(vi, dj)
        tokens.append("[" + ",".join(block) + "]")

    # vertices not reachable from infinity (fully saddle-connected): append
    # in a deterministic geometric order
    rest = [i for i in range(len(S.turning_points)) if i not in vertex_id]
    for i in sorted(rest, key=lambda i: (abs(S.turning_points[i][0]),
                                         S.turning_points[i][0].real)):
        register_vertex(i, 0)
    while qi < len(queue):
        v = queue[qi]
        qi += 1
        mult = S.turning_points[v][1]
        block = [f"v{vertex_id[v]}(m{mult})"]
        for s in range(mult + 2):
            idx = S.incidence.get((v, s))
            block.append("?" if idx is None else edge_token(idx))
        tokens.append("[" + ",".join(block) + "]")

    if S.fragile:
        tokens.append("fragile")
    return ";".join(tokens)


def topology_signature(S):
    """Canonical string of the vertex-labeled embedded graph.

    Equal strings correspond to orientation-preserving equivalent complexes;
    the encoding is minimized over rotations of the escape-direction circle.
    """
    if S.unresolved:
        raise IncompleteComplexError("incomplete complex")
    if S._signature is None:
        D = len(S.slots)
        S._signature = min(_encode(S, r) for r in range(D))
    return S._signature


def mirrored(S):
    """The complex reflected by z -> conj(z) (orientation reversing)."""
    tps = [(z.conjugate(), m) for z, m in S.turning_points]
    slots = sorted((-a) % (2 * math.pi) for a in S.slots)
    Qc = QuadDifferential(PolynomialC(np.conj(S.Q.q.coeffs)))
    slot_map = {}
    for k, a in enumerate(S.slots):
        target = (-a) % (2 * math.pi)
        slot_map[k] = min(range(len(slots)), key=lambda s: ang_dist(slots[s], target))

    # reflected local direction j -> index in the conjugated direction list
    def dart_map(i, j):
        z_t, m = S.turning_points[i]
        dirs = S.Q.local_stokes_directions(z_t, m)
        new_dirs = Qc.local_stokes_directions(z_t.conjugate(), m)
        target = (-dirs[j]) % (2 * math.pi)
        return min(range(len(new_dirs)), key=lambda s: ang_dist(new_dirs[s], target))

    edges = []
    for e in S.edges:
        ends = tuple(sorted((i, dart_map(i, j)) for (i, j) in
                            (e.ends if e.kind in ("saddle", "loop") else [e.ends[0]])))
        if e.kind in ("saddle", "loop"):
            edges.append(Edge(e.kind, ends))
        else:
            ca = (-e.cross_arg) % (2 * math.pi)
            edges.append(Edge(e.kind, ends, slot=slot_map[e.slot], cross_arg=ca))
    incidence = {}
    for idx, e in enumerate(edges):
        for dart in e.ends:
            incidence[dart] = idx
    return StokesComplex(Qc, tps, slots, edges, incidence, S.unresolved, S.fragile)


def trajectories_to_csv(trajectories, fh):
    """re,im rows, blank line between trajectories."""
    for t in trajectories:
        for z in t.points:
            fh.write(f"{z.real:.17g},{z.imag:.17g}\n")
        fh.write("\n")


def complex_to_dict(S):
    """JSON-ready description of a Stokes complex."""
    def vid(end):
        return f"tp{end}"

    edges = []
    polylines = []
    for e in S.edges:
        polylines.append(e.polyline)
        if e.kind in ("saddle", "loop"):
            frm, to = vid(e.ends[0][0]), vid(e.ends[1][0])
        elif e.kind == "escape":
            frm, to = vid(e.ends[0][0]), f"inf{e.slot}"
        else:
            frm, to = vid(e.ends[0][0]), "unresolved"
        edges.append(
            {
                "from": frm,
                "to": to,
                "kind": e.kind,
                "polyline_index": len(polylines) - 1,
            }
        )
    return {
        "turning_points": [
            {"re": z.real, "im": z.imag, "mult": m} for z, m in S.turning_points
        ],
        "edges": edges,
        "signature": topology_signature(S) if not S.unresolved else None,
        "fragile": S.fragile,
        "unresolved": S.unresolved,
    }, polylines
