import math

import numpy as np
import pytest
from hypothesis import settings
from scipy.spatial.transform import Rotation

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_ACCEPTANCE: dict[str, str] = {}


@pytest.fixture
def report():
    """Record one pass/fail line per acceptance criterion."""
    def _record(key: str, ok: bool, detail: str) -> None:
        _ACCEPTANCE[key] = f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}"
    return _record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(_ACCEPTANCE, key=lambda k: int(k.split()[1].rstrip(":"))):
            terminalreporter.write_line(_ACCEPTANCE[key])


def random_rigid_motion(rng):
    """(Q, t) with Q a random rotation (possibly composed with a reflection)."""
    Q = Rotation.random(random_state=rng).as_matrix()
    if rng.random() < 0.5:
        Q = Q @ np.diag([1.0, 1.0, -1.0])
    return Q, rng.normal(scale=3.0, size=3)


def apply_motion(motion, p):
    Q, t = motion
    p = np.asarray(p, dtype=float)
    if p.shape[-1] == 2:
        p = np.concatenate([p, np.zeros(p.shape[:-1] + (1,))], axis=-1)
    return p @ Q.T + t


def regular_polygon(n, radius=1.0, center=(0.0, 0.0), phase=0.0):
    th = phase + 2.0 * np.pi * np.arange(n) / n
    return np.column_stack((center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)))


def analytic_cases():
    """(label, support, site, branch points) for the closed-form supports."""
    from distcdf.analytic import BallSupport, DiskSupport, SegmentSupport

    disk = DiskSupport.from_normal((0.0, 0.0, 0.0), 1.0)
    ball = BallSupport((0.0, 0.0, 0.0), 1.0)
    seg = SegmentSupport((0.0, 0.0, 0.0), (2.0, 0.0, 0.0))
    cases = []
    for label, P in (
        ("disk centre", (0, 0, 0)),
        ("disk inside", (0.5, 0, 0)),
        ("disk outside", (2, 0, 0)),
        ("disk off-plane", (0.3, 0, 0.5)),
    ):
        h, R1 = abs(P[2]), abs(P[0])
        kinks = [h] + [math.hypot(h, x) for x in (abs(1 - R1), 1 + R1)]
        cases.append((label, disk, P, kinks))
    for label, P in (
        ("ball centre", (0, 0, 0)),
        ("ball inside", (0.5, 0, 0)),
        ("ball surface", (1.0, 0, 0)),
        ("ball outside", (2.5, 0, 0)),
    ):
        R1 = abs(P[0])
        cases.append((label, ball, P, [abs(1 - R1), 1 + R1]))
    for label, P in (
        ("segment on", (0.5, 0, 0)),
        ("segment collinear", (3.0, 0, 0)),
        ("segment off, inside", (0.5, 1.0, 0)),
        ("segment off, outside", (-1.0, 0.5, 0.5)),
    ):
        Pa = np.asarray(P, float)
        h = math.hypot(Pa[1], Pa[2])
        kinks = [h, np.linalg.norm(Pa), np.linalg.norm(Pa - [2, 0, 0])]
        cases.append((label, seg, P, kinks))
    return cases
