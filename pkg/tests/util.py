"""Shared scene builders and output parsers for the test suite."""

import dataclasses
import math

import numpy as np

from nfcrb import Target, from_positions, make_scene, ula


def target_at(range_m, angle_deg, v=(1.0, 4.0), alpha=(1.0, 0.1)):
    """Target at origin-frame polar coordinates (range, angle from +y)."""
    th = math.radians(angle_deg)
    return Target(x=range_m * math.sin(th), y=range_m * math.cos(th),
                  vx=v[0], vy=v[1], rcs_re=alpha[0], rcs_im=alpha[1])


def small_scene(n=8, m=4, r=100.0, angle_deg=20.0, v=(1.0, 4.0)):
    return make_scene(targets=[target_at(r, angle_deg, v=v)],
                      tx=ula(n, 0.01), rx=ula(n, 0.01), snapshots=m)


def canonical_scene():
    # single default target, N=32, M=16
    return make_scene(tx=ula(32, 0.01), rx=ula(32, 0.01), snapshots=16)


def rotate_scene(scene, deg):
    """Rigidly rotate arrays, positions, and velocities about the origin."""
    th = math.radians(deg)
    rot = np.array([[math.cos(th), -math.sin(th)],
                    [math.sin(th), math.cos(th)]])
    targets = []
    for t in scene.targets:
        p = rot @ np.array([t.x, t.y])
        v = rot @ np.array([t.vx, t.vy])
        targets.append(Target(x=p[0], y=p[1], vx=v[0], vy=v[1],
                              rcs_re=t.rcs_re, rcs_im=t.rcs_im))
    return dataclasses.replace(
        scene, tx=from_positions(scene.tx.positions @ rot.T),
        rx=from_positions(scene.rx.positions @ rot.T), targets=tuple(targets))


def parse_kv_lines(text):
    """key=value report lines into a dict (floats where possible)."""
    out = {}
    for line in text.splitlines():
        if line.startswith("#") or "=" not in line:
            continue
        key, _, value = line.partition("=")
        try:
            out[key] = float(value) if value else None
        except ValueError:
            out[key] = value
    return out


def parse_csv(text):
    """Sweep CSV into (metadata lines, header list, row dicts of strings)."""
    meta, header, rows = [], None, []
    for line in text.splitlines():
        if line.startswith("#"):
            meta.append(line)
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(dict(zip(header, line.split(","))))
    return meta, header, rows
