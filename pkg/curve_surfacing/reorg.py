"""
Regularization of a curve drawing before lofting.

A drawing straight out of multiview reconstruction is noisy, over-fragmented,
over-grouped across corners and partly duplicated. The stages here smooth,
group, bridge, deduplicate, resample, break at corners and prune, and
`reorganize` runs them as a schedule of rounds with growing thresholds.
"""
import logging
from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve
from scipy.spatial import cKDTree

from .curve_graph import END, START, CurveDrawing, arclength
from .params import SettingsParams
from .settings import surfacing_settings
from .utils import angle_between, parallel_map, point_polyline_distance


log = logging.getLogger("curve_surfacing")

TORSION_WEIGHT = 1.0
# tangents within this sine of the chord span no plane
PLANE_SINE_EPS = 1e-9


@dataclass(frozen=True)
class ReorgParams(SettingsParams):
    tau_length: float = 0.03
    smooth_lambda: float = 5.0
    kappa_break: float = 100.0
    tau_dist: float = 0.02
    tau_cocirc: float = 0.35
    overlap_eps: float = 0.005
    resample_step: float = 0.01
    rounds: int = 3

    setting_names = {
        "tau_length": "TAU_LENGTH",
        "smooth_lambda": "SMOOTH_LAMBDA",
        "kappa_break": "KAPPA_BREAK",
        "tau_dist": "TAU_DIST",
        "tau_cocirc": "TAU_COCIRC",
        "overlap_eps": "OVERLAP_EPS",
        "resample_step": "RESAMPLE_STEP",
        "rounds": "REORG_ROUNDS",
    }

    def validate(self):
        for name in ("tau_length", "smooth_lambda", "kappa_break", "tau_dist",
                     "tau_cocirc", "overlap_eps", "resample_step"):
            self.require(getattr(self, name) > 0, "%s must be positive" % name)
        self.require(1 <= int(self.rounds) <= 8, "rounds must be in [1, 8]")

    def scaled(self, factor):
        """
        Thresholds of an intermediate round; ``kappa_break`` is only used at full scale.
        """
        return replace(
            self,
            tau_length=self.tau_length * factor,
            smooth_lambda=self.smooth_lambda * factor,
            tau_dist=self.tau_dist * factor,
            tau_cocirc=self.tau_cocirc * factor,
            overlap_eps=self.overlap_eps * factor,
            resample_step=self.resample_step * factor,
        )


@dataclass
class ReorgReport:
    rounds: int = 0
    merged: int = 0
    bridged: int = 0
    deduplicated: int = 0
    broken: int = 0
    pruned: int = 0

    def to_dict(self):
        return dict(self.__dict__)


class _IdPool(object):
    def __init__(self, drawing):
        self.next = drawing.next_id()

    def take(self):
        value = self.next
        self.next += 1
        return value


def prune_short(drawing, tau_length):
    """
    Remove fragments shorter than ``tau_length``.
    """
    if tau_length <= 0:
        return drawing
    kept = [f for f in drawing.fragments if arclength(f) >= tau_length]
    if len(kept) != len(drawing.fragments):
        log.debug("pruned %d fragments shorter than %.4f m", len(drawing.fragments) - len(kept), tau_length)
    return drawing.with_fragments(kept)


def _second_difference(n, cyclic):
    if cyclic:
        rows = np.repeat(np.arange(n), 3)
        cols = (rows + np.tile([-1, 0, 1], n)) % n
        vals = np.tile([1.0, -2.0, 1.0], n)
        return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return sparse.diags([1.0, -2.0, 1.0], [0, 1, 2], shape=(n - 2, n), format="csr")


def smoothing_objective(points, original, lam, closed=False):
    """
    Value of the fidelity plus second-difference smoothness energy.
    """
    D = _second_difference(len(points), closed)
    return float(np.sum((points - original) ** 2) + lam * np.sum((D @ points) ** 2))


def smooth_fragment(fragment, lam):
    """
    Penalized least-squares smoothing keeping the sample count.

    Minimizes ``sum |q_i - p_i|^2 + lam * sum |q_{i-1} - 2 q_i + q_{i+1}|^2``.
    Open fragments keep their endpoints; closed ones use cyclic differences.
    """
    n = len(fragment)
    if n < 4 or lam <= 0:
        return fragment
    p = fragment.points
    D = _second_difference(n, fragment.closed)
    A = (sparse.identity(n, format="csr") + lam * (D.T @ D)).tocsr()
    if fragment.closed:
        q = spsolve(A.tocsc(), p)
    else:
        free = np.arange(1, n - 1)
        fixed = np.array([0, n - 1])
        A_ff = A[free][:, free]
        A_fb = A[free][:, fixed]
        rhs = p[free] - A_fb @ p[fixed]
        q = p.copy()
        q[free] = spsolve(A_ff.tocsc(), rhs)
    q = np.asarray(q).reshape(n, 3)
    assert np.all(np.isfinite(q)), "smoothing system is singular"
    return fragment.with_points(q)


def discrete_curvature(fragment):
    """
    Circumscribed-circle curvature ``2 sin(theta / 2) / l`` per interior sample.

    Open fragments yield ``n - 2`` values (samples 1..n-2); closed ones yield ``n``.
    """
    p = fragment.points
    if fragment.closed:
        prev, here, nxt = np.roll(p, 1, axis=0), p, np.roll(p, -1, axis=0)
    else:
        if len(p) < 3:
            return np.zeros(0)
        prev, here, nxt = p[:-2], p[1:-1], p[2:]
    d0 = here - prev
    d1 = nxt - here
    l0 = np.linalg.norm(d0, axis=1)
    l1 = np.linalg.norm(d1, axis=1)
    theta = np.arctan2(np.linalg.norm(np.cross(d0, d1), axis=1), np.einsum("ij,ij->i", d0, d1))
    return 2.0 * np.sin(theta / 2.0) / (0.5 * (l0 + l1))


def corner_indices(fragment, kappa_break):
    """
    Sample indices that are local curvature maxima above ``kappa_break``.

    Samples next to an open endpoint only qualify on three-point fragments,
    which keeps corner breaking idempotent.
    """
    kappa = discrete_curvature(fragment)
    if not len(kappa):
        return []
    if fragment.closed:
        left, right = np.roll(kappa, 1), np.roll(kappa, -1)
        offset = 0
    else:
        pad = np.inf if len(kappa) > 1 else -np.inf
        left = np.concatenate([[pad], kappa[:-1]])
        right = np.concatenate([kappa[1:], [pad]])
        offset = 1
    # ">" on the left, ">=" on the right: the first sample of a plateau wins
    is_max = (kappa > left) & (kappa >= right) & (kappa > kappa_break)
    return (np.flatnonzero(is_max) + offset).tolist()


def break_at_corners(fragment, kappa_break):
    """
    Split a fragment at its corners; the corner sample is shared by both children.

    Children keep the parent id; callers re-number them. Closed fragments
    open up at their corners.
    """
    corners = corner_indices(fragment, kappa_break)
    if not corners:
        return [fragment]
    p = fragment.points
    if fragment.closed:
        rolled = np.vstack([p[corners[0]:], p[:corners[0]]])
        closing = np.vstack([rolled, rolled[:1]])
        cuts = [c - corners[0] for c in corners] + [len(p)]
        pieces = [closing[a:b + 1] for a, b in zip(cuts[:-1], cuts[1:])]
    else:
        cuts = [0] + corners + [len(p) - 1]
        pieces = [p[a:b + 1] for a, b in zip(cuts[:-1], cuts[1:])]
    return [fragment.with_points(piece, closed=False) for piece in pieces if len(piece) >= 2]


def endpoint_tangent(fragment, flag):
    """
    Unit tangent at an endpoint pointing away from the fragment, from the last 3 samples.
    """
    p = fragment.points
    k = min(2, len(p) - 1)
    if flag == END:
        t = p[-1] - p[-1 - k]
    else:
        t = p[0] - p[k]
    return t / np.linalg.norm(t)


def cocircularity(P1, T1, P2, T2):
    """
    Good-continuation measure between point-tangent pairs, in radians.

    With the chord ``u = (P2 - P1) / |P2 - P1|``, ``alpha`` is the angle from
    ``T1`` to ``u`` and ``beta`` the angle from ``u`` to ``T2``, each measured in
    its own plane. On a common circle traversed consistently the two are equal
    and the planes coincide; the full angle between the planes is added as a
    torsion penalty. A plane is undefined only when its tangent lies on the
    chord, and then no torsion is charged.
    """
    P1, T1, P2, T2 = (np.asarray(v, dtype=float) for v in (P1, T1, P2, T2))
    chord = P2 - P1
    length = np.linalg.norm(chord)
    if length == 0:
        raise ValueError("co-circularity is undefined for coincident points")
    u = chord / length
    n1 = np.cross(T1, u)
    n2 = np.cross(u, T2)
    alpha = angle_between(T1, u)
    beta = angle_between(u, T2)
    s1, s2 = np.linalg.norm(n1), np.linalg.norm(n2)
    torsion = 0.0
    if s1 > PLANE_SINE_EPS and s2 > PLANE_SINE_EPS:
        plane_angle = angle_between(n1, n2)
        if plane_angle > np.pi / 2:
            # opposite turning senses: an inflection, not a circle
            beta = -beta
            plane_angle = np.pi - plane_angle
        torsion = plane_angle
    return float(abs(alpha - beta) + TORSION_WEIGHT * torsion)


def endpoint_continuity(fragment_a, flag_a, fragment_b, flag_b, tolerance=None):
    """
    Continuation cost from an endpoint of ``fragment_a`` into ``fragment_b``.

    Coincident endpoints fall back to the turning angle between the tangents.
    """
    if tolerance is None:
        tolerance = surfacing_settings.NODE_MERGE_TOLERANCE
    P1 = fragment_a.endpoint(flag_a)
    P2 = fragment_b.endpoint(flag_b)
    T1 = endpoint_tangent(fragment_a, flag_a)
    T2 = -endpoint_tangent(fragment_b, flag_b)
    if np.linalg.norm(P2 - P1) <= tolerance:
        return angle_between(T1, T2)
    return cocircularity(P1, T1, P2, T2)


def _chain(drawing, links, coincident):
    """
    Concatenate fragments along ``links`` (pairs of ``(id, flag)`` endpoints).

    Each endpoint appears in at most one link. Coincident links drop the
    duplicated junction sample; a chain whose ends are linked becomes closed.
    """
    if not links:
        return drawing, 0
    lookup = drawing.by_id
    partner = {}
    for a, b in links:
        partner[a] = b
        partner[b] = a

    used = set()
    fragments = []
    for fragment in drawing.fragments:
        if fragment.id in used:
            continue
        if (fragment.id, START) not in partner and (fragment.id, END) not in partner:
            fragments.append(fragment)
            used.add(fragment.id)
            continue

        # walk back to a free start, or detect a cycle
        current, flag = fragment.id, START
        visited = {current}
        cyclic = False
        while (current, flag) in partner:
            other_id, other_flag = partner[(current, flag)]
            if other_id in visited:
                cyclic = True
                break
            visited.add(other_id)
            current = other_id
            flag = END if other_flag == START else START
        if cyclic:
            current, flag = min(visited), START

        pieces = []
        members = []
        start_id, entry = current, flag
        closed = False
        while True:
            f = lookup[current]
            members.append(current)
            pts = f.points if entry == START else f.points[::-1]
            exit_flag = END if entry == START else START
            if pieces and coincident:
                pts = pts[1:]
            pieces.append(pts)
            used.add(current)
            nxt = partner.get((current, exit_flag))
            if nxt is None:
                break
            if nxt[0] == start_id and nxt[1] == flag:
                closed = True
                break
            current, entry = nxt
        points = np.vstack(pieces)
        if closed and coincident:
            points = points[:-1]
        fragments.append(lookup[min(members)].with_points(points, closed=closed))
    return drawing.with_fragments(fragments), len(links)


def _select_links(candidates):
    """
    Greedy best-first selection; each endpoint is consumed at most once.
    """
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))
    taken = set()
    links = []
    for cost, a, b in candidates:
        if a in taken or b in taken:
            continue
        taken.add(a)
        taken.add(b)
        links.append((a, b))
    return links


def bridge_gaps(drawing, tau_dist, tau_cocirc):
    """
    Join endpoints closer than ``tau_dist`` whose continuation cost is below
    ``tau_cocirc`` with a straight bridge segment.
    """
    merged, _ = _bridge_gaps(drawing, tau_dist, tau_cocirc)
    return merged


def _bridge_gaps(drawing, tau_dist, tau_cocirc):
    tolerance = surfacing_settings.NODE_MERGE_TOLERANCE
    keys, points = [], []
    for f in drawing.fragments:
        if f.closed:
            continue
        keys += [(f.id, START), (f.id, END)]
        points += [f.start, f.end]
    if len(keys) < 2:
        return drawing, 0
    lookup = drawing.by_id
    candidates = []
    for i, j in sorted(cKDTree(np.asarray(points)).query_pairs(tau_dist)):
        a, b = keys[i], keys[j]
        if a[0] == b[0]:
            continue
        gap = np.linalg.norm(points[i] - points[j])
        if gap <= tolerance or gap >= tau_dist:
            continue
        cost = endpoint_continuity(lookup[a[0]], a[1], lookup[b[0]], b[1])
        if cost < tau_cocirc:
            candidates.append((cost, a, b))
    links = _select_links(candidates)
    for a, b in links:
        log.debug("bridging %s to %s", a, b)
    return _chain(drawing, links, coincident=False)


def merge_at_junctions(drawing, tau_cocirc):
    """
    Merge the two fragments meeting at every degree-2 node with good continuation.
    """
    merged, _ = _merge_at_junctions(drawing, tau_cocirc)
    return merged


def _merge_at_junctions(drawing, tau_cocirc):
    total = 0
    while True:
        lookup = drawing.by_id
        candidates = []
        for node in drawing.nodes:
            if node.degree != 2:
                continue
            a, b = sorted(node.incident)
            fa, fb = lookup[a[0]], lookup[b[0]]
            if a[0] == b[0] and len(fa) < 4:
                continue
            cost = endpoint_continuity(fa, a[1], fb, b[1], tolerance=np.inf)
            if cost < tau_cocirc:
                candidates.append((cost, a, b))
        links = _select_links(candidates)
        if not links:
            return drawing, total
        drawing, count = _chain(drawing, links, coincident=True)
        total += count


def dedup_overlaps(drawing, overlap_eps):
    """
    Remove from each fragment the samples lying within ``overlap_eps`` of a
    longer fragment, splitting it where runs are removed.
    """
    deduplicated, _ = _dedup_overlaps(drawing, overlap_eps)
    return deduplicated


def _rank(fragment):
    # longer first, lower id first on ties
    return (-arclength(fragment), fragment.id)


def _dedup_overlaps(drawing, overlap_eps):
    removed = 0
    ids = _IdPool(drawing)
    while True:
        fragments = sorted(drawing.fragments, key=_rank)
        boxes = [(f.points.min(axis=0) - overlap_eps, f.points.max(axis=0) + overlap_eps) for f in fragments]
        changed = False
        result = list(fragments)
        for i in range(len(fragments) - 1, 0, -1):
            shorter = result[i]
            if shorter is None:
                continue
            lo = shorter.points.min(axis=0)
            hi = shorter.points.max(axis=0)
            mask = np.zeros(len(shorter), dtype=bool)
            for j in range(i):
                longer = result[j]
                if longer is None:
                    continue
                box_lo, box_hi = boxes[j]
                if np.any(hi < box_lo) or np.any(lo > box_hi):
                    continue
                mask |= point_polyline_distance(shorter.points, longer.points, longer.closed) < overlap_eps
            if not mask.any():
                continue
            changed = True
            removed += int(mask.sum())
            result[i] = None
            pieces = _split_runs(shorter, ~mask)
            for k, piece in enumerate(pieces):
                result.append(piece if k == 0 else piece.with_points(piece.points, id=ids.take()))
        if not changed:
            return drawing, removed
        drawing = drawing.with_fragments([f for f in result if f is not None])


def _split_runs(fragment, keep):
    """
    Maximal runs of kept samples as open fragments; runs under 2 samples are dropped.
    """
    if keep.all():
        return [fragment]
    keep = np.asarray(keep)
    if fragment.closed and keep[0] and keep[-1]:
        # rotate so the wrap-around run is contiguous
        shift = int(np.flatnonzero(~keep)[-1]) + 1
        points = np.roll(fragment.points, -shift, axis=0)
        keep = np.roll(keep, -shift)
    else:
        points = fragment.points
    pieces = []
    edges = np.flatnonzero(np.diff(np.concatenate([[0], keep.astype(int), [0]])))
    for a, b in zip(edges[0::2], edges[1::2]):
        if b - a >= 2:
            pieces.append(fragment.with_points(points[a:b], closed=False))
    return pieces


def resample(fragment, step):
    """
    Uniform arclength resampling with ``max(2, round(L / step) + 1)`` samples.

    Open fragments keep both endpoints exactly; closed fragments keep their
    first sample and at least three samples.
    """
    length = arclength(fragment)
    count = max(2, int(round(length / step)) + 1)
    if fragment.closed:
        points = np.vstack([fragment.points, fragment.points[:1]])
        count = max(4, count)
    else:
        points = fragment.points
    s = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(points, axis=0), axis=1))])
    targets = np.linspace(0.0, s[-1], count)
    out = np.column_stack([np.interp(targets, s, points[:, k]) for k in range(3)])
    out[0] = points[0]
    out[-1] = points[-1]
    if fragment.closed:
        out = out[:-1]
    return fragment.with_points(out)


def break_drawing_at_corners(drawing, kappa_break):
    broken, _ = _break_drawing_at_corners(drawing, kappa_break)
    return broken


def _break_drawing_at_corners(drawing, kappa_break):
    ids = _IdPool(drawing)
    fragments = []
    splits = 0
    for fragment in drawing.fragments:
        children = break_at_corners(fragment, kappa_break)
        splits += len(children) - 1
        for k, child in enumerate(children):
            fragments.append(child if k == 0 else child.with_points(child.points, id=ids.take()))
    return drawing.with_fragments(fragments), splits


def _map_fragments(drawing, func, threads):
    return drawing.with_fragments(parallel_map(func, drawing.fragments, threads))


def reorganize(drawing, params, threads=None):
    drawing, _ = reorganize_with_report(drawing, params, threads)
    return drawing


def reorganize_with_report(drawing, params, threads=None):
    """
    Run ``params.rounds`` rounds of smooth, merge, bridge, dedup, resample,
    break (final round only) and prune, with thresholds ramped linearly to
    their final values.
    """
    report = ReorgReport()
    rounds = int(params.rounds)
    for r in range(1, rounds + 1):
        current = params.scaled(r / rounds)
        drawing = _map_fragments(drawing, lambda f: smooth_fragment(f, current.smooth_lambda), threads)
        drawing, merged = _merge_at_junctions(drawing, current.tau_cocirc)
        drawing, bridged = _bridge_gaps(drawing, current.tau_dist, current.tau_cocirc)
        drawing, deduplicated = _dedup_overlaps(drawing, current.overlap_eps)
        drawing = _map_fragments(drawing, lambda f: resample(f, current.resample_step), threads)
        broken = 0
        if r == rounds:
            drawing, broken = _break_drawing_at_corners(drawing, params.kappa_break)
        before = len(drawing)
        drawing = prune_short(drawing, current.tau_length)
        pruned = before - len(drawing)

        report.rounds = r
        report.merged += merged
        report.bridged += bridged
        report.deduplicated += deduplicated
        report.broken += broken
        report.pruned += pruned
        log.info(
            "reorg round %d/%d: %d fragments (merged %d, bridged %d, dedup %d samples, broken %d, pruned %d)",
            r, rounds, len(drawing), merged, bridged, deduplicated, broken, pruned,
            extra={"stage": "reorg", "count": len(drawing)},
        )
    return CurveDrawing(drawing.fragments), report
