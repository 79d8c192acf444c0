"""Stretch-factor search, certification of the two planar conditions, and angle limits."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cut_tree import CutTree, require_valid
from .development import (develop, develop_boundary, develop_mixed, planar_compose,
                          congruence_deviation, PlanarPath)
from .errors import DomainError, GeneralPositionError, SearchExhausted
from .geom import DEFAULT_TOL, ambient_angle, orient2d
from .polyhedron import Z_UP, Polyhedron, affine_stretch, as_direction, check_general_position
from .simplicity import is_simple
from .tracing import (SurfacePath, compose, compose_index, gamma_i,
                      gamma_prime_i, trace_boundary)


@dataclass(frozen=True, order=False)
class Dyadic:
    """Exact value mantissa * 2**exponent, kept in lowest terms (odd mantissa or zero)."""

    mantissa: int
    exponent: int = 0

    def __post_init__(self):
        m, e = int(self.mantissa), int(self.exponent)
        while m and m % 2 == 0:
            m //= 2
            e += 1
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", e if m else 0)

    @classmethod
    def from_fraction(cls, q: Fraction):
        q = Fraction(q)
        den = q.denominator
        if den & (den - 1):
            raise DomainError(f"{q} is not dyadic")
        return cls(q.numerator, -(den.bit_length() - 1))

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa) * Fraction(2) ** self.exponent

    def __float__(self):
        return math.ldexp(float(self.mantissa), self.exponent)

    def double(self, times=1) -> "Dyadic":
        return Dyadic(self.mantissa, self.exponent + times)

    def midpoint(self, other: "Dyadic") -> "Dyadic":
        return Dyadic.from_fraction((self.to_fraction() + other.to_fraction()) / 2)

    def __lt__(self, other):
        return self.to_fraction() < other.to_fraction()

    def __le__(self, other):
        return self.to_fraction() <= other.to_fraction()

    def to_dict(self):
        return {"mantissa": self.mantissa, "exponent": self.exponent}

    @classmethod
    def from_dict(cls, d):
        return cls(d["mantissa"], d["exponent"])

    def __str__(self):
        f = self.to_fraction()
        return str(f.numerator) if f.denominator == 1 else str(f)


@dataclass
class StretchResult:
    lam: Dyadic
    simple: bool
    c1_certified: bool
    c2_certified: bool
    probes: list = field(default_factory=list)  # (Dyadic, simple)
    first_simple: Dyadic = None

    @property
    def lambda_value(self) -> float:
        return float(self.lam)

    def to_dict(self):
        return {"lambda": self.lam.to_dict(), "simple": self.simple,
                "c1_certified": self.c1_certified, "c2_certified": self.c2_certified,
                "first_simple": self.first_simple.to_dict() if self.first_simple else None,
                "probes": [{"lambda": l.to_dict(), "simple": s} for l, s in self.probes]}

    @classmethod
    def from_dict(cls, d):
        return cls(Dyadic.from_dict(d["lambda"]), d["simple"], d["c1_certified"], d["c2_certified"],
                   [(Dyadic.from_dict(p["lambda"]), p["simple"]) for p in d["probes"]],
                   Dyadic.from_dict(d["first_simple"]) if d.get("first_simple") else None)


class _Context:
    """Per (P, T, u) data that does not depend on the stretch factor."""

    def __init__(self, P, T, u, tol):
        self.P, self.T, self.u, self.tol = P, T, as_direction(u), tol
        self.TP = trace_boundary(P, T, self.u)
        self._gammas = None
        self._primes = None

    @property
    def gammas(self):
        if self._gammas is None:
            self._gammas = [gamma_i(self.T, self.TP, i) for i in range(self.TP.k)]
        return self._gammas

    @property
    def primes(self):
        if self._primes is None:
            self._primes = [gamma_prime_i(self.P, self.T, self.TP, i) for i in range(1, self.TP.k + 1)]
        return self._primes

    def stretched(self, lam) -> Polyhedron:
        return affine_stretch(self.P, self.u, float(lam))


def _context(P, T, u, tol, ctx):
    if ctx is not None:
        return ctx
    return _Context(P, T, u, tol)


def _probe_simple(ctx: _Context, lam) -> bool:
    return is_simple(develop_boundary(ctx.stretched(lam), ctx.TP), ctx.tol).simple


def stretch_search(P: Polyhedron, T: CutTree, u=Z_UP, lam_start=1, cap_exponent=30,
                   refine_steps=0, certify=False, tol=DEFAULT_TOL) -> StretchResult:
    """Smallest probe lam_start * 2**j (j = 0, 1, ...) giving a simple unfolding.

    With ``refine_steps`` > 0 the bracket between the last failing and the
    first successful probe is bisected that many times.  With ``certify``
    the doubling continues past the first simple probe until both planar
    conditions are certified; if the cap is reached first, the first simple
    probe is returned with its certification flags.
    """
    u = as_direction(u)
    rep = check_general_position(P, u, tol)
    if not rep.is_general:
        raise GeneralPositionError(rep.reason)
    require_valid(P, T, u, tol)
    ctx = _Context(P, T, u, tol)
    lam = lam_start if isinstance(lam_start, Dyadic) else Dyadic.from_fraction(Fraction(lam_start))
    if float(lam) < 1:
        raise DomainError("stretch factor must be >= 1")
    cap = Dyadic(1, cap_exponent)
    probes = []
    found = None
    last_fail = None
    while lam <= cap:
        ok = _probe_simple(ctx, lam)
        probes.append((lam, ok))
        if ok:
            found = lam
            break
        last_fail = lam
        lam = lam.double()
    if found is None:
        raise SearchExhausted(f"no simple unfolding up to 2^{cap_exponent}", probes=probes)
    if refine_steps and last_fail is not None:
        lo, hi = last_fail, found
        for _ in range(refine_steps):
            mid = lo.midpoint(hi)
            ok = _probe_simple(ctx, mid)
            probes.append((mid, ok))
            if ok:
                hi = mid
            else:
                lo = mid
        found = hi
    first = found
    c1 = bool(certify_C1(P, T, found, u, tol, ctx))
    c2 = bool(certify_C2(P, T, found, u, tol, ctx))
    if certify and not (c1 and c2):
        lam = found.double()
        while lam <= cap:
            ok = _probe_simple(ctx, lam)
            probes.append((lam, ok))
            if ok:
                k1 = bool(certify_C1(P, T, lam, u, tol, ctx))
                k2 = bool(certify_C2(P, T, lam, u, tol, ctx))
                if k1 and k2:
                    return StretchResult(lam, True, True, True, probes, first)
            lam = lam.double()
    return StretchResult(found, True, c1, c2, probes, first)


@dataclass
class CertReport:
    ok: bool
    failures: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _monotone_runs_match(planar: PlanarPath, hs) -> list:
    """Edges whose planar height change does not match the sign of the surface height change."""
    dy = np.diff(planar.vertices[:, 1])
    dh = np.diff(hs)
    return [int(e) for e in np.nonzero(~((np.sign(dy) == np.sign(dh)) & (dh != 0)))[0]]


def certify_C1(P: Polyhedron, T: CutTree, lam, u=Z_UP, tol=DEFAULT_TOL, ctx=None) -> CertReport:
    """Every monotone run of each branch path and each closed loop develops monotonically."""
    ctx = _context(P, T, u, tol, ctx)
    Q = ctx.stretched(lam)
    failures = []
    eps_ok = True
    worst = 0.0
    paths = [("gamma", i, g) for i, g in enumerate(ctx.gammas)]
    paths += [("gamma_prime", i + 1, g) for i, g in enumerate(ctx.primes)]
    for name, i, path in paths:
        if len(path) < 2:
            continue
        hs = path.heights(Q, ctx.u)
        if name == "gamma_prime" and i == ctx.TP.k:
            planar = develop_boundary(Q, ctx.TP)
        else:
            planar = develop(Q, path, tol=tol)
        bad = _monotone_runs_match(planar, hs)
        if bad:
            failures.append((name, i, bad))
        # distance to the vertical limit path, against half the smallest height gap
        gap = float(np.min(np.abs(np.diff(hs))))
        limit = np.column_stack([np.zeros(len(hs)), hs - hs[0]])
        dist = float(np.max(np.linalg.norm(planar.vertices - limit, axis=1)))
        worst = max(worst, dist / (gap / 2))
        eps_ok &= dist <= gap / 2
    return CertReport(not failures, failures, {"epsilon_condition": eps_ok, "worst_ratio": worst})


def _quad_angle_sum(planar: PlanarPath):
    """Interior angles at both endpoints between the endpoint chord and the adjacent edges."""
    v = planar.vertices
    chord = v[-1] - v[0]

    def ang(a, b):
        return math.atan2(abs(a[0] * b[1] - a[1] * b[0]), float(a @ b))

    return ang(chord, v[1] - v[0]) + ang(-chord, v[-2] - v[-1])


def certify_C2(P: Polyhedron, T: CutTree, lam, u=Z_UP, tol=DEFAULT_TOL, ctx=None,
               rel_tol=1e-7) -> CertReport:
    """For consecutive branch paths: the planar composition is simple, one-sided and not vertical."""
    ctx = _context(P, T, u, tol, ctx)
    Q = ctx.stretched(lam)
    failures = []
    identity_dev = 0.0
    angle_ok = True
    G = ctx.gammas
    for i in range(len(G) - 1):
        a, b = G[i], G[i + 1]
        Gi = a.inverse()
        m = compose_index(Gi, b)
        direct = planar_compose(develop(Q, a, tol=tol), develop(Q, b, tol=tol), m)
        comp = compose(Gi, b)
        base = min(len(a) - 1 - m, max(len(comp) - 2, 0))
        mixed = develop_mixed(Q, comp, base, tol=tol)
        identity_dev = max(identity_dev, congruence_deviation(direct, mixed) / max(Q.diameter, 1e-300))
        v = direct.vertices
        if len(v) < 3:
            failures.append((i, "degenerate composition"))
            continue
        if not is_simple(direct, tol).simple:
            failures.append((i, "not simple"))
            continue
        p, q = v[0], v[-1]
        chord = q - p
        if abs(chord[0]) <= tol.eps_len * np.linalg.norm(chord):
            failures.append((i, "vertical endpoint line"))
            continue
        sides = {orient2d(p, q, x) for x in v[1:-1]}
        if len(sides) != 1 or 0 in sides:
            failures.append((i, "not one-sided"))
            continue
        angle_ok &= _quad_angle_sum(direct) < math.pi
    return CertReport(not failures, failures,
                      {"identity_deviation": identity_dev, "quadrilateral_angle_bound": angle_ok})


# -- limits of stretched angles -------------------------------------------------

@dataclass
class LimitRow:
    index: int
    point: object
    expected: str
    observed_left: str
    observed_right: str
    left: list
    right: list
    ambient: list

    @property
    def matches(self):
        return _label_ok(self.expected, self.observed_left, self.observed_right)


def _label_ok(expected, left, right):
    if expected == "pi":
        return left == right == "pi"
    if expected == "zero":
        return left == right == "zero"
    if expected == "two_pi":
        return left == right == "two_pi"
    return {left, right} == {"zero", "two_pi"}


def _nearest_label(x):
    labels = {"zero": 0.0, "pi": math.pi, "two_pi": 2 * math.pi}
    return min(labels, key=lambda k: abs(labels[k] - x))


LIMIT_VALUES = {"zero": 0.0, "pi": math.pi, "two_pi": 2 * math.pi}


def expected_limit(P: Polyhedron, path: SurfacePath, i, u=Z_UP) -> str:
    """Label of the limit of both angles at interior index i under unbounded stretching."""
    h = path.heights(P, u)
    rep = check_general_position(P, u)
    g = path[i]
    if g in (rep.top_vertex, rep.bottom_vertex):
        return "zero"
    if (h[i - 1] - h[i]) * (h[i + 1] - h[i]) < 0:
        return "pi"
    if path[i - 1] == path[i + 1]:
        # turning back along one edge: both angles equal the total angle
        return "two_pi"
    return "zero_or_two_pi"


def limit_angle_report(P: Polyhedron, path: SurfacePath, schedule, u=Z_UP, tol=DEFAULT_TOL):
    """Left/right angles and ambient angles at every interior point across a stretch schedule."""
    u = as_direction(u)
    h = path.heights(P, u)
    if np.any(np.abs(np.diff(h)) <= tol.eps_len * P.diameter):
        raise DomainError("path has a horizontal edge")
    lams = [float(x) for x in schedule]
    L = np.empty((len(lams), len(path) - 2))
    R = np.empty_like(L)
    A = np.empty_like(L)
    for s, lam in enumerate(lams):
        Q = affine_stretch(P, u, lam)
        L[s] = path.left_angles(Q, tol)
        R[s] = path.right_angles(Q, tol)
        x = path.positions(Q)
        A[s] = [ambient_angle(x[i - 1] - x[i], x[i + 1] - x[i]) for i in range(1, len(path) - 1)]
    rows = []
    for j in range(len(path) - 2):
        i = j + 1
        rows.append(LimitRow(i, path[i], expected_limit(P, path, i, u),
                             _nearest_label(L[-1, j]), _nearest_label(R[-1, j]),
                             L[:, j].tolist(), R[:, j].tolist(), A[:, j].tolist()))
    return rows
