"""Rational certificates for flag programs and their exact verification."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import lcm
from pathlib import Path
from typing import Sequence

import numpy as np

from .densities import local_mask
from .errors import DimensionMismatch, FormatError, InequalityViolated, NotPSD
from .flagsdp import FlagProblem, SolverResult, labelled_canonical, objective_value


@dataclass
class Certificate:
    lam: Fraction
    matrices: dict[int, list[list[Fraction]]] = field(default_factory=dict)

    def to_json(self) -> str:
        types = [
            {"id": tid, "matrix": [[str(x) for x in row] for row in M]}
            for tid, M in sorted(self.matrices.items())
        ]
        return json.dumps({"lambda": str(self.lam), "types": types}, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        try:
            data = json.loads(text)
            lam = Fraction(data["lambda"])
            mats = {}
            for entry in data.get("types", []):
                tid = int(entry["id"])
                if tid in mats:
                    raise FormatError(f"type {tid} listed twice")
                mats[tid] = [[Fraction(x) for x in row] for row in entry["matrix"]]
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"malformed certificate: {exc}") from None
        return cls(lam, mats)

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    @classmethod
    def load(cls, path) -> "Certificate":
        return cls.from_json(Path(path).read_text())


def zero_certificate(problem: FlagProblem) -> Certificate:
    """All-zero matrices with lambda the largest objective coefficient."""
    return Certificate(problem.basis.trivial_bound,
                       {t.id: [[Fraction(0)] * len(t) for _ in range(len(t))] for t in problem.tafs})


# -- exact PSD test ----------------------------------------------------------


def _integer_scaled(M: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    den = 1
    for row in M:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    return [[int(Fraction(x) * den) for x in row] for row in M]


def psd_failure(M: Sequence[Sequence[Fraction]]) -> int | None:
    """Index of a witness row if M is not PSD, else None.

    Fraction-free symmetric elimination: pivot on a positive diagonal entry,
    and once every remaining diagonal entry is zero require the remaining
    block to vanish.  Each Bareiss entry has the sign of the corresponding
    Schur complement entry since all earlier pivots are positive.
    """
    A = _integer_scaled(M)
    n = len(A)
    idx = list(range(n))
    prev = 1
    for k in range(n):
        best = max(range(k, n), key=lambda r: A[r][r])
        p = A[best][best]
        if p < 0:
            return idx[best]
        if p == 0:
            for r in range(k, n):
                for c in range(k, n):
                    if A[r][c] != 0:
                        return idx[r]
            return None
        if best != k:
            A[k], A[best] = A[best], A[k]
            for row in A:
                row[k], row[best] = row[best], row[k]
            idx[k], idx[best] = idx[best], idx[k]
        for r in range(k + 1, n):
            ark = A[r][k]
            row_r, row_k = A[r], A[k]
            for c in range(r, n):
                v = (p * row_r[c] - ark * row_k[c]) // prev
                row_r[c] = v
                A[c][r] = v
        prev = p
    return None


def is_psd(M: Sequence[Sequence[Fraction]]) -> bool:
    return psd_failure(M) is None


# -- inequalities ---------------------------------------------------------------


def _check_shapes(problem: FlagProblem, cert: Certificate):
    sizes = {t.id: len(t) for t in problem.tafs}
    for tid, M in cert.matrices.items():
        if tid not in sizes:
            raise DimensionMismatch(f"certificate has unknown type id {tid}")
        n = sizes[tid]
        if len(M) != n or any(len(row) != n for row in M):
            raise DimensionMismatch(f"type {tid} needs a {n}x{n} matrix")
        for a in range(n):
            for b in range(a):
                if M[a][b] != M[b][a]:
                    raise DimensionMismatch(f"type {tid} matrix is not symmetric")


def inequality_values(problem: FlagProblem, cert: Certificate) -> list[Fraction]:
    """objective_i + sum over types of <Q, M(G_i)> for every admissible, exactly."""
    m = len(problem.basis)
    totals = [Fraction(0)] * m
    for sp in problem.pairs:
        M = cert.matrices.get(sp.type_id)
        if M is None:
            continue
        Qint = _integer_scaled(M)
        qden = lcm(*[Fraction(x).denominator for row in M for x in row]) if sp.size else 1
        flat = [x for row in Qint for x in row]
        acc = [0] * m
        for i, code, count in zip(sp.admissible.tolist(), sp.code.tolist(), sp.count.tolist()):
            acc[i] += count * flat[code]
        for i in range(m):
            if acc[i]:
                totals[i] += Fraction(acc[i], qden * sp.denominator)
    return [o + t for o, t in zip(problem.basis.objective, totals)]


def _independent_value(problem: FlagProblem, cert: Certificate, i: int) -> Fraction:
    """Re-derive one inequality from scratch: objective and flag pairs by direct enumeration."""
    G = problem.basis.admissibles[i]
    N = G.n
    value = objective_value(G, problem.basis.target)
    for taf in problem.tafs:
        Q = cert.matrices.get(taf.id)
        if Q is None:
            continue
        where = {mask: a for a, mask in enumerate(taf.flags)}
        total, den = Fraction(0), 0
        for theta in permutations(range(N), taf.t):
            rest = [v for v in range(N) if v not in theta]
            matches = local_mask(G, list(theta)) == taf.type_mask
            for X in combinations(rest, taf.f - taf.t):
                den += 1
                if not matches:
                    continue
                Y = [v for v in rest if v not in X]
                a = where[labelled_canonical(local_mask(G, list(theta) + list(X)), taf.f, taf.t, taf.k)]
                b = where[labelled_canonical(local_mask(G, list(theta) + Y), taf.f, taf.t, taf.k)]
                total += Q[a][b]
        value += total / den
    return value


def verify_certificate(problem: FlagProblem, cert: Certificate, spot_checks: int = 10, seed: int = 0) -> Fraction:
    """Return lambda if the certificate proves it, otherwise raise."""
    _check_shapes(problem, cert)
    for tid, M in sorted(cert.matrices.items()):
        bad = psd_failure(M)
        if bad is not None:
            raise NotPSD(tid, bad)
    values = inequality_values(problem, cert)
    for i, v in enumerate(values):
        if v > cert.lam:
            raise InequalityViolated(i, cert.lam - v)
    rng = random.Random(seed)
    picks = rng.sample(range(len(values)), min(spot_checks, len(values)))
    for i in picks:
        if _independent_value(problem, cert, i) != values[i]:
            raise AssertionError(f"independent re-evaluation disagrees on admissible {i}")
    return cert.lam


# -- rounding -----------------------------------------------------------------------


def round_certificate(problem: FlagProblem, result: SolverResult, digits: int = 9, tol: float = 1e-9) -> Certificate:
    """Best-effort rational certificate from a numerical solution.

    Each Q is factored as L L^T from its non-negligible eigenpairs and L is
    rounded to ``digits`` decimals, so the rational Q = L L^T is PSD by
    construction.  Lambda is then the exact maximum over the inequalities.
    """
    scale = 10 ** digits
    mats = {}
    for taf, Y in zip(problem.tafs, result.blocks):
        Y = (np.asarray(Y, dtype=float) + np.asarray(Y, dtype=float).T) / 2
        w, V = np.linalg.eigh(Y)
        keep = w > tol
        L = V[:, keep] * np.sqrt(w[keep])
        Li = [[int(round(x * scale)) for x in row] for row in L]
        n = len(taf)
        den = scale * scale
        Q = [[Fraction(0)] * n for _ in range(n)]
        for a in range(n):
            for b in range(a, n):
                s = sum(x * y for x, y in zip(Li[a], Li[b]))
                Q[a][b] = Q[b][a] = Fraction(s, den)
        mats[taf.id] = Q
    cert = Certificate(Fraction(0), mats)
    cert.lam = max(inequality_values(problem, cert))
    return cert
