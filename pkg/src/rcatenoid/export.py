"""CSV profile tables and OBJ meshes.

Numbers are written with 17 significant digits through ``format(x, ".17g")``,
which is locale independent and round-trips doubles exactly, so identical
inputs give byte-identical files.
"""
from __future__ import annotations

import io
import math
from pathlib import Path

import numpy as np

from . import __version__
from .curvature import mean_curvatures, principal_curvatures
from .errors import DomainError
from .family import FamilyParams
from .heights import DEFAULT_QUADRATURE, QuadratureSettings
from .profile import DEFAULT_ODE, OdeSettings, first_integral_residual, integrate_profile
from .search import find_root


def fmt(x) -> str:
    x = float(x)
    if x == 0.0:
        return "0"
    return format(x, ".17g")


def _header(fields):
    return "".join(f"# {k}={v}\n" for k, v in fields)


def provenance(fp, a, ode: OdeSettings, quad: QuadratureSettings, **extra):
    out = [("generator", f"rcatenoid {__version__}"), ("n", fp.n), ("r", fp.r), ("q", fmt(fp.q)),
           ("a", fmt(a)), ("ode_rel_tol", fmt(ode.rel_tol)), ("ode_abs_tol", fmt(ode.abs_tol)),
           ("f_cap", fmt(ode.f_cap)), ("quad_rel_tol", fmt(quad.rel_tol)),
           ("quad_abs_tol", fmt(quad.abs_tol))]
    out.extend((k, v) for k, v in extra.items())
    return out


def profile_columns(n):
    return ["t", "f", "f_t", "f_tt", "k1", "kn"] + [f"H_{j}" for j in range(1, n + 1)] + ["first_integral_residual"]


def profile_rows(curve):
    """Rows for ``-t_stop .. t_stop``; the lower half is the mirror image of the upper."""
    fp, a = curve.family, curve.a
    upper = []
    for p in curve.samples:
        k = principal_curvatures(fp, p)
        h = mean_curvatures(k)
        upper.append([p.t, p.f, p.f_t, p.f_tt, k[0], k[-1], *h, first_integral_residual(fp, a, p)])
    lower = []
    for row in reversed(upper[1:]):
        mirrored = list(row)
        mirrored[0] = -row[0]
        mirrored[2] = -row[2]
        lower.append(mirrored)
    return lower + upper


def profile_csv_text(fp: FamilyParams, a: float, ode: OdeSettings = DEFAULT_ODE,
                     quad: QuadratureSettings = DEFAULT_QUADRATURE) -> str:
    curve = integrate_profile(fp, a, ode, quad)
    buf = io.StringIO(newline="")
    buf.write(_header(provenance(fp, a, ode, quad, L_estimate=fmt(curve.L_estimate),
                                 L_error_estimate=fmt(curve.L_error_estimate),
                                 t_stop=fmt(curve.t_stop), stop_reason=curve.stop_reason)))
    buf.write(",".join(profile_columns(fp.n)) + "\n")
    for row in profile_rows(curve):
        buf.write(",".join(fmt(x) for x in row) + "\n")
    return buf.getvalue()


def write_text(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def read_profile_csv(path):
    """Parse a profile CSV back into ``(metadata, column_names, ndarray)``."""
    meta, columns, rows = {}, None, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key] = value
            elif columns is None:
                columns = line.split(",")
            elif line:
                rows.append([float(x) for x in line.split(",")])
    return meta, columns, np.array(rows)


def validate_profile_table(meta, columns, data, conservation_tol=1e-8, r_minimal_tol=1e-9):
    """Re-check the profile invariants on a parsed table; returns a list of problems."""
    problems = []
    n, r, a = int(meta["n"]), int(meta["r"]), float(meta["a"])
    q = float(meta["q"])
    col = {name: i for i, name in enumerate(columns)}
    t, f, ft, ftt = (data[:, col[c]] for c in ("t", "f", "f_t", "f_tt"))
    if not np.all(np.diff(t) > 0):
        problems.append("t is not strictly increasing")
    zero = np.flatnonzero(t == 0.0)
    if len(zero) != 1 or f[zero[0]] != a or ft[zero[0]] != 0.0:
        problems.append("neck row (t=0, f=a, f_t=0) missing")
    if np.any(f <= 0):
        problems.append("non-positive radius")
    if np.any(ftt < q * (1 - 1e-12)):
        problems.append("f_tt below q")
    if not (np.array_equal(t, -t[::-1]) and np.array_equal(f, f[::-1]) and np.array_equal(ft, -ft[::-1])):
        problems.append("profile is not even in t")
    h_ord = data[:, col[f"H_{r + 1}"]]
    if np.max(np.abs(h_ord)) >= r_minimal_tol:
        problems.append(f"|H_{r + 1}| reaches {np.max(np.abs(h_ord)):.3e}")
    res = data[:, col["first_integral_residual"]]
    if np.max(np.abs(res)) >= conservation_tol:
        problems.append(f"first-integral residual reaches {np.max(np.abs(res)):.3e}")
    if n != len([c for c in columns if c.startswith("H_")]):
        problems.append("wrong number of H columns")
    return problems


def mesh_data(fp: FamilyParams, a: float, n_t: int = 200, n_theta: int = 128, rho_max: float = 6.0,
              ode: OdeSettings = DEFAULT_ODE, quad: QuadratureSettings = DEFAULT_QUADRATURE):
    """Vertices and quad faces of the revolved profile for ``n = 2``.

    Rows run over ``2 n_t + 1`` heights uniform in ``[-t_max, t_max]``,
    where the profile reaches ``rho_max``; columns over ``n_theta`` angles
    in ``[0, 2 pi)``, wrapped.  Faces are ordered so their right-hand normal
    points along the surface normal (horizontal part towards the axis).
    """
    if fp.n != 2:
        raise DomainError(f"mesh export covers n = 2 only (got n={fp.n}); use profile export instead")
    if not a < rho_max < ode.f_cap:
        raise DomainError(f"need a < rho_max < f_cap, got a={a}, rho_max={rho_max}, f_cap={ode.f_cap}")
    curve = integrate_profile(fp, a, ode, quad)
    t_max = find_root(lambda t: curve.at(t).f - rho_max, 0.0, curve.t_stop)
    heights = np.linspace(-t_max, t_max, 2 * n_t + 1)
    heights[n_t] = 0.0
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    ring = np.column_stack([np.cos(theta), np.sin(theta)])
    vertices = []
    for t in heights:
        radius = math.tanh(0.5 * curve.at(float(t)).f)
        for c, s in ring:
            vertices.append((radius * c, radius * s, float(t)))
    faces = []
    for i in range(2 * n_t):
        for j in range(n_theta):
            jn = (j + 1) % n_theta
            v00, v10 = i * n_theta + j, (i + 1) * n_theta + j
            v11, v01 = (i + 1) * n_theta + jn, i * n_theta + jn
            faces.append((v00, v10, v11, v01))
    return np.array(vertices), faces


def mesh_obj_text(fp, a, n_t=200, n_theta=128, rho_max=6.0, ode=DEFAULT_ODE, quad=DEFAULT_QUADRATURE):
    vertices, faces = mesh_data(fp, a, n_t, n_theta, rho_max, ode, quad)
    buf = io.StringIO(newline="")
    buf.write(_header(provenance(fp, a, ode, quad, n_t=n_t, n_theta=n_theta, rho_max=fmt(rho_max))))
    for x, y, z in vertices:
        buf.write(f"v {fmt(x)} {fmt(y)} {fmt(z)}\n")
    for face in faces:
        buf.write("f " + " ".join(str(i + 1) for i in face) + "\n")
    return buf.getvalue()


def read_obj(path):
    verts, faces = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append([int(x) - 1 for x in parts[1:]])
    return np.array(verts), faces


def export_profile(fp: FamilyParams, a: float, path, ode: OdeSettings = DEFAULT_ODE,
                   quad: QuadratureSettings = DEFAULT_QUADRATURE) -> Path:
    return write_text(path, profile_csv_text(fp, a, ode, quad))


def export_mesh(fp: FamilyParams, a: float, path, n_t: int = 200, n_theta: int = 128, rho_max: float = 6.0,
                ode: OdeSettings = DEFAULT_ODE, quad: QuadratureSettings = DEFAULT_QUADRATURE) -> Path:
    return write_text(path, mesh_obj_text(fp, a, n_t, n_theta, rho_max, ode, quad))
