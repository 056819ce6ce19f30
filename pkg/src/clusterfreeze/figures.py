"""Static figures (matplotlib, Agg backend).

Coordinates are converted to floats here and only here; nothing computed
from a figure feeds back into exact arithmetic.
"""

import io
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "clusterfreeze"
matplotlib.rcParams["path.simplify"] = False

_META = {"svg": {"Date": None, "Creator": None}, "png": {"Software": None},
         "pdf": {"CreationDate": None, "Creator": None, "Producer": None}}


def _save(fig, path=None, fmt=None):
    fmt = fmt or (str(path).rsplit(".", 1)[-1].lower() if path else "svg")
    meta = _META.get(fmt, {})
    if path is None:
        buf = io.StringIO() if fmt == "svg" else io.BytesIO()
        fig.savefig(buf, format=fmt, metadata=meta)
        plt.close(fig)
        return buf.getvalue()
    fig.savefig(path, format=fmt, metadata=meta)
    plt.close(fig)
    return str(path)


def _slice_xy(seed, m):
    u = [float(m[k]) for k in seed.unfrozen]
    return (u + [0.0, 0.0])[:2]


def _wall_segment(seed, wall, R):
    """Endpoints of a wall in the unfrozen plane, clipped to radius ``R``."""
    from .scattering import pair
    # direction orthogonal to the normal in the plane
    a = float(pair(seed, _unit_vec(seed, 0), wall.n0))
    b = float(pair(seed, _unit_vec(seed, 1), wall.n0)) if seed.rank > 1 else 0.0
    dx, dy = -b, a
    norm = math.hypot(dx, dy) or 1.0
    dx, dy = dx / norm * R, dy / norm * R
    if wall.incoming:
        return (-dx, -dy), (dx, dy)
    ray = _slice_xy(seed, wall.bounds[0])
    if ray[0] * dx + ray[1] * dy < 0:
        dx, dy = -dx, -dy
    return (0.0, 0.0), (dx, dy)


def _unit_vec(seed, c):
    out = [0] * seed.n
    out[seed.unfrozen[c]] = 1
    return out


def draw_diagram(diagram, ax, R=10.0, path=None):
    seed = diagram.seed
    for wall in sorted(diagram.walls, key=lambda w: (not w.incoming, w.n0)):
        (x0, y0), (x1, y1) = _wall_segment(seed, wall, R)
        style = "-" if wall.incoming else "--"
        ax.plot([x0, x1], [y0, y1], style, color="black" if wall.incoming else "tab:blue", lw=1.2)
        ax.annotate(str(tuple(wall.n0)), (x1, y1), fontsize=7)
    if path:
        xs, ys = zip(*[_slice_xy(seed, p) for p in path])
        ax.plot(xs, ys, color="tab:red", lw=1.0, marker=".")
    ax.set_xlim(-R, R)
    ax.set_ylim(-R, R)
    ax.set_aspect("equal")
    ax.set_title(f"walls up to order {diagram.K}")


def diagram_svg(diagram, size=400, path=None):
    """SVG text of the unfrozen-plane slice of a rank-2 diagram."""
    fig, ax = plt.subplots(figsize=(size / 100, size / 100), dpi=100)
    draw_diagram(diagram, ax, path=path)
    return _save(fig, None, "svg")


def plot_diagram(diagram, out, path=None):
    fig, ax = plt.subplots(figsize=(5, 5))
    draw_diagram(diagram, ax, path=path)
    return _save(fig, out)


def plot_broken_lines(lines, diagram, out, R=10.0):
    """Broken lines drawn in the unfrozen plane, ending at their common base point."""
    seed = diagram.seed
    fig, ax = plt.subplots(figsize=(5, 5))
    draw_diagram(diagram, ax, R)
    for line in lines:
        pts = []
        for exp, _, start in line.segments:
            if start is not None:
                pts.append(_slice_xy(seed, start))
        pts.append(_slice_xy(seed, line.base))
        first = line.segments[0][0]
        if len(pts) >= 1:
            x, y = pts[0]
            d = _slice_xy(seed, first)
            pts.insert(0, (x + d[0] * R, y + d[1] * R))
        xs, ys = zip(*pts)
        ax.plot(xs, ys, lw=0.9)
    ax.set_title(f"{len(lines)} broken lines for m={tuple(lines[0].m) if lines else ''}")
    return _save(fig, out)


def plot_exchange_graph(graph, out):
    """Seeds on a circle in BFS order with labelled edges."""
    ids = graph.node_ids()
    N = max(len(ids), 1)
    pos = {i: (math.cos(2 * math.pi * i / N), math.sin(2 * math.pi * i / N)) for i in range(N)}
    fig, ax = plt.subplots(figsize=(5, 5))
    for a, b, k in graph._id_edges(ids):
        (x0, y0), (x1, y1) = pos[a], pos[b]
        ax.plot([x0, x1], [y0, y1], color="gray", lw=0.8)
        ax.annotate(str(k + 1), ((x0 + x1) / 2, (y0 + y1) / 2), fontsize=7)
    for key in graph.order:
        i = ids[key]
        word = ",".join(str(k + 1) for k in graph.states[key].word) or "t0"
        ax.plot(*pos[i], "o", color="tab:blue")
        ax.annotate(word, pos[i], fontsize=7, xytext=(3, 3), textcoords="offset points")
    ax.set_axis_off()
    ax.set_title(f"{len(graph)} seeds")
    return _save(fig, out)


def plot_newton(fpoly, out, title="F-polynomial support"):
    """Exponents of a two-variable F-polynomial."""
    pts = [n for n, c in sorted(fpoly.items()) if not c.is_zero()]
    fig, ax = plt.subplots(figsize=(4, 4))
    if pts:
        xs = [float(p[0]) for p in pts]
        ys = [float(p[1]) if len(p) > 1 else 0.0 for p in pts]
        ax.scatter(xs, ys)
    ax.set_title(title)
    return _save(fig, out)
