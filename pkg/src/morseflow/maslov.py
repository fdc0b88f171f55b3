"""Maslov index of a loop of Lagrangian subspaces of (R^{2n}, omega_0).

Coordinates are blocked as (x_1..x_n, y_1..y_n) and the symplectic form
pairs omega(a, b) = a_x . b_y - a_y . b_x.  A subspace is presented by a
2n x n frame of spanning columns.  After orthonormalization a Lagrangian
frame [X; Y] yields a unitary matrix Z = X + iY under the identification
(x, y) -> x + iy, and det(Z)^2 is independent of the frame choice, so it
descends to the Lagrangian Grassmannian.  The index is the winding number
of det^2 along the loop, accumulated by phase unwrapping; the convention
makes the half-turn line loop t -> span(cos(pi t), sin(pi t)) in R^2 have
index +1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    LoopNotClosedError,
    NotLagrangianError,
    SamplingTooCoarseError,
    UsageError,
)

LAGRANGIAN_TOL = 1e-10
CLOSURE_TOL = 1e-8
RESIDUAL_TOL = 0.1


@dataclass(frozen=True)
class LagrangianLoop:
    thetas: tuple            # increasing sample parameters
    frames: tuple            # matching 2n x n numpy arrays

    @property
    def n(self) -> int:
        return self.frames[0].shape[1]

    @classmethod
    def from_samples(cls, samples) -> "LagrangianLoop":
        thetas, frames = [], []
        for th, fr in samples:
            thetas.append(float(th))
            frames.append(np.asarray(fr, dtype=float))
        return cls(tuple(thetas), tuple(frames))

    @classmethod
    def from_csv(cls, path: str) -> "LagrangianLoop":
        rows = []
        header_seen = False
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    row = [float(tok) for tok in line.split(",")]
                except ValueError:
                    if not rows and not header_seen:
                        header_seen = True      # one column-name header is fine
                        continue
                    raise UsageError(
                        f"{path}:{lineno}: row is not comma-separated numbers")
                if rows and len(row) != len(rows[0]):
                    raise UsageError(
                        f"{path}:{lineno}: expected {len(rows[0])} fields, "
                        f"got {len(row)}")
                rows.append(row)
        if not rows:
            raise LoopNotClosedError("empty loop file")
        width = len(rows[0]) - 1
        n = int(round(math.sqrt(width / 2)))
        if n == 0 or 2 * n * n != width:
            raise NotLagrangianError(
                f"row width {width} is not 2*n^2 for any integer n")
        samples = [(r[0], np.asarray(r[1:]).reshape(2 * n, n)) for r in rows]
        return cls.from_samples(samples)


def _orthonormal(frame: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(frame)
    if np.min(np.abs(np.diag(r))) < 1e-10 * max(1.0, float(np.max(np.abs(frame)))):
        raise NotLagrangianError("frame columns are linearly dependent")
    return q


def _check_lagrangian(frame: np.ndarray):
    two_n, n = frame.shape
    if two_n != 2 * n:
        raise NotLagrangianError(f"frame shape {frame.shape} is not 2n x n")
    X, Y = frame[:n], frame[n:]
    pairing = X.T @ Y - Y.T @ X   # omega evaluated on all column pairs
    if np.max(np.abs(pairing)) > LAGRANGIAN_TOL * max(1.0, float(np.max(np.abs(frame))) ** 2):
        raise NotLagrangianError(
            f"frame violates the Lagrangian condition by {np.max(np.abs(pairing)):.3e}")


def _det_squared(frame: np.ndarray) -> complex:
    q = _orthonormal(frame)
    n = frame.shape[1]
    Z = q[:n] + 1j * q[n:]
    # orthonormal + Lagrangian => unitary; guard against silent drift
    if np.max(np.abs(Z.conj().T @ Z - np.eye(n))) > 1e-8:
        raise NotLagrangianError("orthonormalized frame is not unitary in C^n")
    d = complex(np.linalg.det(Z))
    return d * d


def validate_loop(loop: LagrangianLoop):
    if len(loop.frames) < 2:
        raise LoopNotClosedError("a loop needs at least two samples")
    for fr in loop.frames:
        _check_lagrangian(fr)
    q0 = _orthonormal(loop.frames[0])
    q1 = _orthonormal(loop.frames[-1])
    gap = np.linalg.norm(q0 @ q0.T - q1 @ q1.T, 2)
    if gap > CLOSURE_TOL:
        raise LoopNotClosedError(
            f"first and last subspaces differ by {gap:.3e} (tolerance {CLOSURE_TOL})")


def maslov_index(loop: LagrangianLoop) -> int:
    """Winding number of det^2 along the loop.

    Raises SamplingTooCoarseError when consecutive samples jump by a phase
    of pi or more, or when the accumulated winding is farther than 0.1
    from an integer.
    """
    validate_loop(loop)
    dets = [_det_squared(fr) for fr in loop.frames]
    total = 0.0
    for a, b in zip(dets, dets[1:]):
        delta = cmath.phase(b / a)
        if abs(delta) >= math.pi * (1.0 - 1e-12):
            raise SamplingTooCoarseError(
                f"phase jump {delta:+.3f} between consecutive samples")
        total += delta
    winding = total / (2.0 * math.pi)
    index = round(winding)
    if abs(winding - index) >= RESIDUAL_TOL:
        raise SamplingTooCoarseError(
            f"winding {winding:.4f} is not within {RESIDUAL_TOL} of an integer")
    return int(index)


def concatenate(a: LagrangianLoop, b: LagrangianLoop) -> LagrangianLoop:
    """Join two loops sharing a base subspace; indices add."""
    qa = _orthonormal(a.frames[-1])
    qb = _orthonormal(b.frames[0])
    if np.linalg.norm(qa @ qa.T - qb @ qb.T, 2) > CLOSURE_TOL:
        raise LoopNotClosedError("loops do not share the base subspace")
    shift = a.thetas[-1] - b.thetas[0]
    thetas = a.thetas + tuple(t + shift for t in b.thetas[1:])
    frames = a.frames + b.frames[1:]
    return LagrangianLoop(thetas, frames)
