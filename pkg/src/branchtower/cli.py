"""Command-line entry point.

Exit codes: 0 ok, 1 other failure, 2 parse/usage error, 3 disconnected layer,
4 non-torsion (vanishing characteristic element), 5 growth inconsistency,
6 dual layers not a branched cover.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .graph import GraphError
from .growth import DisconnectedLayerError, check_growth, consistency, growth_csv
from .iwasawa import CharElement, NonTorsionError, char_element, char_of_jacobian, poly_from_terms
from .jacobian import jacobian_invariants, kappa, picard_invariants
from .planar import dual_tower_check, dual_layer, EmbeddingError
from .specio import SpecError, canonical_json, load_spec
from .tower import MAX_LAYER_VERTICES, TowerError, build_layer, label, ord_p, projected_vertex_count
from .verify import verify_corpus

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_DISCONNECTED, EXIT_NONTORSION, EXIT_INCONSISTENT, EXIT_DUAL = 0, 1, 2, 3, 4, 5, 6

log = logging.getLogger("branchtower")


class CliExit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _emit(payload: dict, fmt: str, text: str | None = None) -> None:
    if fmt == "json":
        sys.stdout.write(canonical_json(payload))
    else:
        sys.stdout.write(text if text is not None else _as_text(payload))


def _as_text(payload: dict, indent: str = "") -> str:
    lines = []
    for k in sorted(payload):
        v = payload[k]
        if isinstance(v, dict):
            lines.append(f"{indent}{k}:")
            lines.append(_as_text(v, indent + "  ").rstrip("\n"))
        else:
            lines.append(f"{indent}{k}: {v}")
    return "\n".join(lines) + "\n"


def _connected_layer(spec, n):
    layer = build_layer(spec, n)
    from .graph import is_connected

    if not is_connected(layer.graph):
        raise CliExit(EXIT_DISCONNECTED, f"layer {n} is not connected")
    return layer


def _default_max_n(spec) -> int:
    top = 3 if spec.d == 1 else 2
    while top > 2 and projected_vertex_count(spec, top) > MAX_LAYER_VERTICES:
        top -= 1
    return top


def cmd_layer(args, sf) -> int:
    spec = sf.spec
    layer = build_layer(spec, args.n)
    g = layer.graph
    from .graph import is_connected

    payload = {
        "name": spec.name,
        "level": args.n,
        "vertices": len(g.vertices),
        "edges": g.num_edges,
        "vertex_labels": [label(v) for v in g.vertices],
        "edge_list": [{"id": label(d.id), "from": label(d.origin), "to": label(d.terminus)} for d in g.edges()],
    }
    if not is_connected(g):
        raise CliExit(EXIT_DISCONNECTED, f"layer {args.n} is not connected")
    _emit(payload, args.format, f"layer {args.n}: {len(g.vertices)} vertices, {g.num_edges} edges\n")
    return EXIT_OK


def cmd_kappa(args, sf) -> int:
    g = _connected_layer(sf.spec, args.n).graph
    k = kappa(g)
    payload = {"name": sf.spec.name, "level": args.n, "kappa": k, "kappa_ord": ord_p(k, sf.spec.p)}
    _emit(payload, args.format, f"{k}\n")
    return EXIT_OK


def cmd_jacobian(args, sf) -> int:
    g = _connected_layer(sf.spec, args.n).graph
    jac = jacobian_invariants(g)
    pic = picard_invariants(g)
    payload = {
        "name": sf.spec.name,
        "level": args.n,
        "jacobian": list(jac.invariant_factors),
        "order": jac.torsion_order,
        "picard_free_rank": pic.free_rank,
    }
    _emit(payload, args.format, f"{jac}\n")
    return EXIT_OK


def cmd_char(args, sf) -> int:
    c = char_element(sf.spec)
    payload = c.to_dict()
    payload["name"] = sf.spec.name
    _emit(payload, args.format, f"{c.poly}  (mu={c.mu}, lambda={c.lam})\n")
    return EXIT_OK


def cmd_invariants(args, sf) -> int:
    spec = sf.spec
    pic = char_element(spec)
    jac = char_of_jacobian(pic, spec.d)
    payload = {"name": spec.name, "char_pic": pic.to_dict(), "char_jac": jac.to_dict(), "mu": jac.mu, "lambda": jac.lam}
    if spec.d == 1:
        v = consistency(spec, args.max_n if args.max_n is not None else _default_max_n(spec))
        payload["nu"] = v.nu
    _emit(payload, args.format)
    return EXIT_OK


def _parse_slack(s):
    if s is None or s == "auto":
        return None
    try:
        val = int(s)
    except ValueError:
        raise CliExit(EXIT_PARSE, f"--slack must be 'auto' or an integer, got {s!r}") from None
    if val < 0:
        raise CliExit(EXIT_PARSE, "--slack must be non-negative")
    return val


def cmd_growth(args, sf) -> int:
    spec = sf.spec
    n_max = args.max_n if args.max_n is not None else _default_max_n(spec)
    if n_max < (3 if spec.d == 1 else 2):
        raise CliExit(EXIT_PARSE, f"--max-n must be at least {3 if spec.d == 1 else 2}")
    slack = _parse_slack(args.slack)
    verdict = consistency(spec, n_max, slack=slack if spec.d >= 2 else None, workers=args.workers)
    payload = verdict.to_dict()
    payload["name"] = spec.name
    recorded_ok = True
    if "char_jac" in sf.expect:
        # invariants recorded in the spec file must also match the observed series
        rec = CharElement.from_poly(poly_from_terms(sf.expect["char_jac"], spec.d), spec.p)
        if spec.d == 1:
            recorded_ok = verdict.observed == (rec.mu, rec.lam)
        else:
            recorded_ok = check_growth(verdict.series, rec.mu, rec.lam, slack).passed
        payload["recorded"] = {"mu": rec.mu, "lambda": rec.lam, "consistent": recorded_ok}
    payload["rows"] = [
        {"n": st.n, "vertices": st.vertices, "edges": st.edges, "kappa_ord": st.kappa_ord, "residual": r}
        for st, r in zip(verdict.series.layers, verdict.residuals)
    ]
    text = growth_csv(verdict.series, verdict.residuals) + f"# consistent={str(verdict.consistent and recorded_ok).lower()} " \
        f"mu={verdict.predicted[0]} lambda={verdict.predicted[1]}\n"
    _emit(payload, args.format, text)
    if not recorded_ok and spec.d == 1:
        return EXIT_INCONSISTENT
    if verdict.consistent and recorded_ok:
        return EXIT_OK
    if spec.d >= 2 and slack is None:
        log.warning("growth residuals exceed the automatic slack %s", verdict.slack)
        return EXIT_OK
    return EXIT_INCONSISTENT


def cmd_dual(args, sf) -> int:
    spec = sf.spec
    if sf.embedding is None:
        raise CliExit(EXIT_PARSE, "spec has no embedding")
    report = dual_tower_check(spec, sf.embedding, args.n, sf.outer_face)
    payload = {"name": spec.name, "level": args.n, "report": report.to_dict()}
    try:
        dl = dual_layer(spec, sf.embedding, args.n, sf.outer_face)
        names = {v: f"F{i}" for i, v in enumerate(dl.dual.graph.vertices)}
        payload["dual"] = {
            "vertices": [names[v] for v in dl.dual.graph.vertices],
            "edges": [{"id": label(d.id), "from": names[d.origin], "to": names[d.terminus]} for d in dl.dual.graph.edges()],
        }
    except EmbeddingError as exc:
        payload["dual"] = None
        payload["embedding_error"] = str(exc)
    text = f"dual tower up to n={args.n}: {'pass' if report.passed else 'FAIL'}\n" + "".join(f"  {f}\n" for f in report.failures)
    _emit(payload, args.format, text)
    return EXIT_OK if report.passed else EXIT_DUAL


def cmd_verify(args) -> int:
    try:
        results = verify_corpus(args.corpus)
    except FileNotFoundError as exc:
        raise CliExit(EXIT_PARSE, str(exc)) from None
    ok = all(r.passed for r in results)
    payload = {"passed": ok, "results": [r.to_dict() for r in results]}
    lines = []
    for r in results:
        lines.append(f"{'PASS' if r.passed else 'FAIL'} {r.spec}")
        if r.error:
            lines.append(f"  error: {r.error}")
        for c in r.checks:
            if not c.passed:
                lines.append(f"  {c.name}: expected {c.expected}, got {c.actual}")
    _emit(payload, args.format, "\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="branchtower", description="Layers, Jacobians and characteristic elements of branched graph towers.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, with_n=False, with_max=False):
        p.add_argument("spec", help="tower spec JSON file")
        p.add_argument("--format", choices=["json", "text"], default="json")
        if with_n:
            p.add_argument("--n", type=int, default=0, help="layer index")
        if with_max:
            p.add_argument("--max-n", type=int, default=None, dest="max_n")
        return p

    common(sub.add_parser("layer", help="summarize layer n"), with_n=True)
    common(sub.add_parser("kappa", help="spanning-tree count of layer n"), with_n=True)
    common(sub.add_parser("jacobian", help="Jacobian invariant factors of layer n"), with_n=True)
    common(sub.add_parser("char", help="characteristic element of the Picard module"))
    common(sub.add_parser("invariants", help="mu, lambda (and nu for rank one)"), with_max=True)
    g = common(sub.add_parser("growth", help="ord_p(kappa) series and consistency verdict"), with_max=True)
    g.add_argument("--slack", default="auto", help="'auto' or an integer constant C")
    g.add_argument("--workers", type=int, default=1, help="processes for building layers")
    common(sub.add_parser("dual", help="dual layers and dual-tower check up to n"), with_n=True)
    v = sub.add_parser("verify", help="run the golden corpus")
    v.add_argument("--corpus", default=None, help="directory of spec files (default: bundled corpus)")
    v.add_argument("--format", choices=["json", "text"], default="text")
    return ap


COMMANDS = {
    "layer": cmd_layer,
    "kappa": cmd_kappa,
    "jacobian": cmd_jacobian,
    "char": cmd_char,
    "invariants": cmd_invariants,
    "growth": cmd_growth,
    "dual": cmd_dual,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if getattr(args, "n", 0) is not None and getattr(args, "n", 0) < 0:
            raise CliExit(EXIT_PARSE, "--n must be non-negative")
        sf = load_spec(args.spec)
        return COMMANDS[args.command](args, sf)
    except CliExit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DisconnectedLayerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCONNECTED
    except NonTorsionError as exc:
        print(f"error: non-torsion: {exc}", file=sys.stderr)
        return EXIT_NONTORSION
    except (TowerError, GraphError, EmbeddingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
