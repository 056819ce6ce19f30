"""Command-line front end.

Vertex indices on the command line and in seed files are 1-based. Seeds
are given as a JSON file or as the name of a catalog seed (``A2``, ``A3``,
``B2``, ``kronecker``, ``ex4``).

Exit codes: 0 success or verified, 1 falsified or error, 2 inconclusive.
"""

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import ClusterError, NotFound, SeedInvariantError
from .seed import Seed, catalog, freeze_seed, mutate_word

CACHE_ENV = "CLUSTERFREEZE_CACHE"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument errors exit with status 1; status 2 means inconclusive."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# parsing helpers ------------------------------------------------------------------

def load_seed(spec):
    path = Path(spec)
    if path.exists():
        text = path.read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{spec}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        try:
            return Seed.from_dict(data)
        except KeyError as exc:
            raise UsageError(f"{spec}: missing field {exc}") from None
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{spec}: {exc}") from None
    names = catalog()
    if spec in names:
        return names[spec]
    raise UsageError(f"no seed file or catalog seed named {spec!r} (catalog: {', '.join(sorted(names))})")


def parse_indices(text, seed=None, what="vertex"):
    """Comma/space separated 1-based indices to 0-based ones."""
    if text is None:
        return None
    text = text.strip()
    if not text:
        return []
    out = []
    for pos, part in enumerate(text.replace(",", " ").split()):
        try:
            k = int(part)
        except ValueError:
            raise UsageError(f"{what} list, item {pos + 1}: {part!r} is not an integer") from None
        if k < 1 or (seed is not None and k > seed.n):
            raise UsageError(f"{what} list, item {pos + 1}: {k} is out of range")
        out.append(k - 1)
    return out


def parse_vector(text, n):
    try:
        vec = tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"vector {text!r} must consist of integers") from None
    if len(vec) != n:
        raise UsageError(f"vector {text!r} has {len(vec)} entries, expected {n}")
    return vec


def _positive(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be strictly positive")
    return v


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def dump(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=str) + "\n"


# cache --------------------------------------------------------------------------------

def cache_dir():
    d = os.environ.get(CACHE_ENV)
    if not d:
        return None
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cached(key_parts, compute):
    """Text result of ``compute()``, memoized on disk when the cache is enabled."""
    base = cache_dir()
    if base is None:
        return compute()
    key = hashlib.sha256(json.dumps(key_parts, sort_keys=True).encode()).hexdigest()[:32]
    path = base / f"{key}.txt"
    if path.exists():
        return path.read_text()
    text = compute()
    tmp = path.with_suffix(".tmp")
    tmp.write_text(text)
    tmp.replace(path)
    return text


# commands --------------------------------------------------------------------------------

def _state(seed, word):
    from .expansion import run_word
    for k in word:
        if k not in seed.unfrozen:
            raise UsageError(f"word: vertex {k + 1} is frozen")
    return run_word(seed, word)


def _var_index(args, seed):
    k = parse_indices(args.var, seed, "variable")
    if len(k) != 1:
        raise UsageError("--var takes exactly one index")
    return k[0]


def cmd_mutate(args, seed):
    word = parse_indices(args.word, seed, "word")
    return dump(mutate_word(seed, word).to_dict())


def cmd_expand(args, seed):
    from .ring import render
    word = parse_indices(args.word, seed, "word")
    i = _var_index(args, seed)

    def compute():
        z = _state(seed, word).vars[i]
        if args.classical:
            z = z.at_one()
        if args.format == "json":
            return dump({"word": [k + 1 for k in word], "var": i + 1, "expansion": render(z)})
        return render(z) + "\n"
    return cached(["expand", seed.id, word, i, args.classical, args.format], compute)


def cmd_gvec(args, seed):
    from .expansion import g_vector
    word = parse_indices(args.word, seed, "word")
    st = _state(seed, word)
    return dump({"word": [k + 1 for k in word],
                 "g_vectors": {str(i + 1): list(g_vector(st, i)) for i in range(seed.n)}})


def cmd_fpoly(args, seed):
    from .expansion import f_polynomial
    from .ring import render_vcoeff
    word = parse_indices(args.word, seed, "word")
    i = _var_index(args, seed)
    fp = f_polynomial(_state(seed, word), i)
    terms = {",".join(str(x) for x in n): render_vcoeff(c) for n, c in sorted(fp.items())}
    return dump({"word": [k + 1 for k in word], "var": i + 1, "fpoly": terms})


def cmd_cvec(args, seed):
    word = parse_indices(args.word, seed, "word")
    st = _state(seed, word)
    return dump({"word": [k + 1 for k in word],
                 "c_vectors": {str(k + 1): [row[c] for row in st.C]
                               for c, k in enumerate(seed.unfrozen)}})


def cmd_graph(args, seed):
    from .expansion import exchange_graph
    graph = exchange_graph(seed, args.depth, args.threads)
    if args.format == "dot":
        return graph.to_dot()
    if args.format == "svg":
        from .figures import plot_exchange_graph
        out = args.output or "exchange_graph.svg"
        plot_exchange_graph(graph, out)
        return dump({"figure": out, "seeds": len(graph), "complete": graph.complete})
    return dump(graph.to_json())


def cmd_freeze(args, seed):
    from .freezing import freeze_element
    from .ring import parse, render
    F = parse_indices(args.freeze, seed, "freeze")
    bad = [k + 1 for k in F if k not in seed.unfrozen]
    if bad:
        raise UsageError(f"--freeze: vertices {bad} are not unfrozen")
    if args.element is None:
        return dump(freeze_seed(seed, F).to_dict())
    try:
        z = parse(args.element, seed.n)
    except ValueError as exc:
        raise UsageError(f"--element: {exc}") from None
    m = parse_vector(args.degree, seed.n) if args.degree else None
    return render(freeze_element(z, F, seed, m)) + "\n"


def cmd_scatter(args, seed):
    from .scattering import complete_rank2, generic_loops, is_consistent, p_diagram
    D = complete_rank2(seed, args.order)
    if args.format == "svg":
        from .figures import plot_diagram
        out = args.output or "diagram.svg"
        plot_diagram(D, out)
        return dump({"figure": out, "walls": len(D.walls)})
    body = D.to_json()
    if args.check:
        body["consistent"] = is_consistent(D, generic_loops(D, args.check))
    body["p_D"] = p_diagram(D).to_json()
    return dump(body)


def cmd_theta(args, seed):
    import random
    from .errors import BadBasePoint
    from .ring import render
    from .theta import enumerate_broken_lines, generic_point, theta, theta_cluster_chamber
    m = parse_vector(args.m, seed.n)
    if seed.rank > 2:
        z, word = theta_cluster_chamber(m, seed, args.depth)
        return dump({"m": list(m), "mode": "cluster-chamber", "word": [k + 1 for k in word],
                     "theta": render(z)})
    from .scattering import complete_rank2
    D = complete_rank2(seed, args.order)
    rng = random.Random(0)
    for _ in range(20):
        Q = generic_point(seed, rng)
        try:
            th = theta(m, Q, D)
            lines = enumerate_broken_lines(m, Q, D) if args.lines or args.format == "svg" else []
            break
        except BadBasePoint:
            continue
    else:
        raise NotFound("no generic base point found")
    if args.format == "svg":
        from .figures import plot_broken_lines
        out = args.output or "broken_lines.svg"
        plot_broken_lines(lines, D, out)
        return dump({"figure": out, "theta": render(th), "lines": len(lines)})
    if args.format == "text":
        return render(th) + "\n"
    body = {"m": list(m), "order": args.order, "base_point": [str(x) for x in Q],
            "theta": render(th)}
    if args.lines:
        body["broken_lines"] = [ln.to_json() for ln in lines]
    return dump(body)


def cmd_verify(args, seed):
    from .verify import EXIT_CODES, Options, REGISTRY, run
    if args.theorem not in REGISTRY:
        raise UsageError(f"unknown theorem id {args.theorem!r}; known: {', '.join(sorted(REGISTRY))}")
    F = parse_indices(args.freeze, seed, "freeze")
    if F is not None:
        bad = [k + 1 for k in F if k not in seed.unfrozen]
        if bad:
            raise UsageError(f"--freeze: vertices {bad} are not unfrozen")
    opts = Options(freeze=F, depth=args.depth, order=args.order, box=args.box, d_max=args.d_max,
                   samples=args.samples, threads=args.threads)
    rep = run(args.theorem, seed, opts)
    return dump(rep), EXIT_CODES[rep["status"]]


def cmd_report(args, seed):
    """Figures written to a directory plus one JSON record per line on stdout."""
    from .expansion import exchange_graph
    from .figures import plot_broken_lines, plot_diagram, plot_exchange_graph
    out = Path(args.output or "report")
    out.mkdir(parents=True, exist_ok=True)
    records = []
    graph = exchange_graph(seed, args.depth, args.threads)
    fig = out / "exchange_graph.png"
    plot_exchange_graph(graph, fig)
    records.append({"artifact": "exchange-graph", "figure": str(fig), "seeds": len(graph),
                    "complete": graph.complete})
    if seed.rank == 2:
        import random
        from .scattering import complete_rank2
        from .theta import enumerate_broken_lines, generic_point
        D = complete_rank2(seed, args.order)
        fig = out / "scattering_diagram.png"
        plot_diagram(D, fig)
        records.append({"artifact": "scattering-diagram", "figure": str(fig),
                        "walls": D.to_json()["walls"]})
        m = tuple(-1 if i in seed.unfrozen else 0 for i in range(seed.n))
        Q = generic_point(seed, random.Random(0))
        lines = enumerate_broken_lines(m, Q, D)
        fig = out / "broken_lines.png"
        plot_broken_lines(lines, D, fig)
        records.append({"artifact": "broken-lines", "figure": str(fig), "m": list(m),
                        "lines": len(lines)})
    return "".join(json.dumps(r, sort_keys=True, default=str) + "\n" for r in records)


# parser -----------------------------------------------------------------------------------

def _common():
    # a fresh parent per subcommand: set_defaults on one must not leak into others
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=_positive, default=1, help="worker threads (default 1)")
    common.add_argument("--output", "-o", help="output file (figures and reports)")
    common.add_argument("--format", choices=["json", "text", "dot", "svg"], default="json")
    return common


def build_parser():

    p = _Parser(prog="clusterfreeze", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_text):
        sp = sub.add_parser(name, parents=[_common()], help=help_text)
        sp.set_defaults(func=func)
        sp.add_argument("seed", help="seed JSON file or catalog name")
        return sp

    sp = add("mutate", cmd_mutate, "mutate a seed along a word")
    sp.add_argument("--word", default="")
    sp = add("expand", cmd_expand, "Laurent expansion of a cluster variable")
    sp.add_argument("--word", default="")
    sp.add_argument("--var", required=True)
    sp.add_argument("--classical", action="store_true", help="specialize v = 1")
    sp.set_defaults(format="text")
    sp = add("gvec", cmd_gvec, "g-vectors of a seed")
    sp.add_argument("--word", default="")
    sp = add("fpoly", cmd_fpoly, "F-polynomial of a cluster variable")
    sp.add_argument("--word", default="")
    sp.add_argument("--var", required=True)
    sp = add("cvec", cmd_cvec, "c-vectors of a seed")
    sp.add_argument("--word", default="")
    sp = add("graph", cmd_graph, "exchange graph up to a depth")
    sp.add_argument("--depth", type=_positive, default=6)
    sp = add("freeze", cmd_freeze, "frozen seed, or frozen element with --element")
    sp.add_argument("--freeze", required=True)
    sp.add_argument("--element", help="Laurent element, e.g. 'x^(-1,0) + x^(-1,1)'")
    sp.add_argument("--degree", help="degree m of the freezing operator, e.g. -1,0")
    sp.set_defaults(format="text")
    sp = add("scatter", cmd_scatter, "rank-2 scattering diagram completion")
    sp.add_argument("--order", type=_positive, default=6)
    sp.add_argument("--check", type=_nonneg, default=0, help="number of loops to test")
    sp = add("theta", cmd_theta, "theta function via broken lines")
    sp.add_argument("--m", required=True)
    sp.add_argument("--order", type=_nonneg, default=6)
    sp.add_argument("--depth", type=_positive, default=8)
    sp.add_argument("--lines", action="store_true", help="include broken lines")
    sp = sub.add_parser("verify", parents=[_common()], help="run a theorem harness")
    sp.set_defaults(func=cmd_verify)
    sp.add_argument("theorem")
    sp.add_argument("seed")
    sp.add_argument("--freeze")
    sp.add_argument("--depth", type=_positive, default=6)
    sp.add_argument("--order", type=_positive, default=6)
    sp.add_argument("--box", type=_nonneg, default=1)
    sp.add_argument("--d-max", dest="d_max", type=_positive, default=8)
    sp.add_argument("--samples", type=_positive, default=10)
    sp = add("report", cmd_report, "figures and JSON-lines summary")
    sp.add_argument("--depth", type=_positive, default=6)
    sp.add_argument("--order", type=_positive, default=6)
    return p


_VALUE_OPTIONS = ("--m", "--degree", "--element")


def _attach_values(argv):
    """``--m -1,0`` becomes ``--m=-1,0`` so that negative vectors are not read as flags."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and argv[i + 1][1:2].isdigit():
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_values(argv))
    try:
        seed = load_seed(args.seed)
        result = args.func(args, seed)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SeedInvariantError as exc:
        print(f"invalid seed ({exc.invariant}): {exc}", file=sys.stderr)
        return 1
    except NotFound as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return 2
    except ClusterError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    code = 0
    if isinstance(result, tuple):
        result, code = result
    if args.output and args.format not in ("svg",) and args.command != "report":
        Path(args.output).write_text(result)
    else:
        sys.stdout.write(result)
    return code


if __name__ == "__main__":
    sys.exit(main())
