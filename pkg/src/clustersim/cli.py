"""Command-line interface: ``clustersim <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import indices as ix
from .experiments import K_VALUES, S_VALUES, SCAN_IDS, k_scan, load_reference_fixture, s_scan
from .inconsistency import analyze_triplet, find_inconsistency_cover, inconsistency_matrix, read_manifest
from .partitions import ENUMERATION_GUARD, read_partition, write_partition
from .properties import PROPERTIES, PropertyBudget, property_matrix
from .stats import baseline_suite

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_BUDGET = 0, 1, 2, 3

DEFAULT_STAT_IDS = ("nmi", "nmi_max", "fnmi", "vi", "rand", "jaccard", "wallace_1", "dice", "fmeasure",
                    "bcubed", "adjusted_rand", "correlation_coefficient", "sokal_sneath_1",
                    "correlation_distance", "ami")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _ids(text: str | None, default) -> list[str]:
    if not text:
        return list(default)
    try:
        return [ix.resolve_id(t) for t in text.split(",") if t.strip()]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _sampling(args, n: int) -> ix.SamplingConfig:
    mode = args.mode
    if mode == "auto":
        mode = "exact" if n <= 10 else "monte-carlo"
    return ix.SamplingConfig(samples=args.samples or 1000, seed=args.seed, mode=mode)


def emit(rows: list[dict], args, columns: list[str] | None = None) -> None:
    columns = columns or (list(rows[0]) if rows else [])
    fmt = args.format or "csv"
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        if fmt == "json":
            json.dump(rows, out, indent=2, default=_jsonable)
            out.write("\n")
        else:
            writer = csv.DictWriter(out, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
            writer.writeheader()
            for row in rows:
                writer.writerow({k: _cell(row.get(k)) for k in columns})
    finally:
        if out is not sys.stdout:
            out.close()


def _jsonable(x):
    if hasattr(x, "item"):
        return x.item()
    return str(x)


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(v, default=_jsonable)
    return "" if v is None else v


# -- commands -----------------------------------------------------------------

def cmd_score(args) -> int:
    a, b = read_partition(args.reference), read_partition(args.candidate)
    if a.n != b.n:
        raise ValueError(f"partitions differ in size: {a.n} != {b.n}")
    ids = _ids(args.indices, [d.id for d in ix.index_registry()])
    scores = ix.score_pair(ids, a, b, _sampling(args, a.n))
    rows = []
    for i in ids:
        s = scores[i]
        rows.append({"index": i, "value": s.value, "higher_is_better": ix.lookup(i).higher_is_better,
                     "undefined": s.undefined or "", "stderr": s.stderr})
    emit(rows, args, ["index", "value", "higher_is_better", "undefined", "stderr"])
    return EXIT_OK


def cmd_matrix(args) -> int:
    parts = [read_partition(p) for p in args.partitions]
    if len({p.n for p in parts}) > 1:
        raise ValueError("partitions differ in size")
    ids = _ids(args.indices, ["nmi", "vi", "rand", "adjusted_rand", "jaccard", "correlation_coefficient"])
    cfg = _sampling(args, parts[0].n)
    rows = []
    for i, pa in enumerate(parts):
        for j, pb in enumerate(parts):
            scores = ix.score_pair(ids, pa, pb, cfg)
            for idx in ids:
                rows.append({"index": idx, "a": args.partitions[i], "b": args.partitions[j],
                             "value": scores[idx].value})
    emit(rows, args, ["index", "a", "b", "value"])
    return EXIT_OK


def cmd_triplets(args) -> int:
    triplets = read_manifest(args.manifest)
    ids = _ids(args.indices, ix.COVER_IDS)
    records = []
    rows = []
    for t, (a, b1, b2) in enumerate(triplets, 1):
        rec = analyze_triplet(a, b1, b2, ids, _sampling(args, a.n))
        records.append(rec)
        for (i, j), verdict in rec.verdicts.items():
            rows.append({"triplet": t, "index_1": i, "index_2": j, "verdict": verdict})
    tallies = inconsistency_matrix(records, ids)
    for i in ids:
        for j in ids:
            if i == j:
                continue
            tl = tallies[(i, j)]
            rows.append({"triplet": "all", "index_1": i, "index_2": j, "inconsistent": tl.inconsistent,
                         "consistent": tl.consistent, "ties": tl.ties, "undefined": tl.undefined,
                         "percent": tl.percent})
    emit(rows, args, ["triplet", "index_1", "index_2", "verdict", "inconsistent", "consistent", "ties",
                      "undefined", "percent"])
    return EXIT_OK


def cmd_find_cover(args) -> int:
    ids = _ids(args.indices, ix.COVER_IDS)
    n_max = args.n_max or 8
    if n_max > ENUMERATION_GUARD:
        raise UsageError(f"--n-max must be <= {ENUMERATION_GUARD}")
    res = find_inconsistency_cover(ids, n_max=n_max, budget_seconds=args.budget, max_size=args.max_size,
                                   seed=args.seed)
    rows = []
    for t, (a, b1, b2) in enumerate(res.triplets, 1):
        pairs = sorted(analyze_triplet(a, b1, b2, ids).inconsistent_pairs())
        rows.append({"triplet": t, "a": a.to_text(), "b1": b1.to_text(), "b2": b2.to_text(),
                     "inconsistent_pairs": ";".join(f"{i}/{j}" for i, j in pairs)})
        if args.out_dir:
            d = Path(args.out_dir)
            d.mkdir(parents=True, exist_ok=True)
            for name, p in (("a", a), ("b1", b1), ("b2", b2)):
                write_partition(p, d / f"triplet{t}_{name}.txt")
    if args.out_dir and res.triplets:
        manifest = "".join(f"triplet{t}_a.txt triplet{t}_b1.txt triplet{t}_b2.txt\n"
                           for t in range(1, len(res.triplets) + 1))
        (Path(args.out_dir) / "manifest.txt").write_text(manifest, encoding="utf-8")
    emit(rows, args, ["triplet", "a", "b1", "b2", "inconsistent_pairs"])
    print(f"cover size {len(res.triplets)}; sampled {res.sampled} triplets, "
          f"{res.distinct_patterns} patterns, {res.seconds:.1f}s", file=sys.stderr)
    if res.unorderable:
        print("never inconsistent (unorderable): " + ", ".join(f"{i}/{j}" for i, j in res.unorderable),
              file=sys.stderr)
    if not res.complete:
        print("budget exhausted; uncovered: " + ", ".join(f"{i}/{j}" for i, j in res.uncovered), file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


def _render_table(rows, ids) -> str:
    by = {(r.index_id, r.property): r for r in rows}
    props = [p for p in PROPERTIES if any((i, p) in by for i in ids)]
    short = {"max_agreement": "max", "min_agreement": "min", "symmetry": "sym", "distance": "dist",
             "linear_complexity": "lin", "monotonicity": "mono", "strong_monotonicity": "strong",
             "constant_baseline_exact": "const", "constant_baseline_asymptotic": "as-const", "bias": "bias"}
    width = max(len(i) for i in ids) + 2
    lines = ["index".ljust(width) + " ".join(short[p].rjust(8) for p in props)]
    for i in ids:
        cells = []
        for p in props:
            v = by.get((i, p))
            cells.append(("" if v is None or v.verdict == "not-applicable" else v.mark).rjust(8))
        lines.append(i.ljust(width) + " ".join(cells))
    lines.append("")
    lines.append("witnesses:")
    for r in rows:
        if r.witness and r.verdict == "violated":
            lines.append(f"  {r.index_id} {r.property} [{r.search_bound}]: {json.dumps(r.witness, default=_jsonable)}")
        elif r.verdict == "error":
            lines.append(f"  {r.index_id} {r.property}: error: {r.note}")
    return "\n".join(lines) + "\n"


def cmd_properties(args) -> int:
    ids = _ids(args.indices, ix.TABLE1_IDS + ix.TABLE2_IDS)
    budget = PropertyBudget(n_max=args.n_max or 6, n_max_sampled=args.n_max_sampled,
                            min_agreement_bound=args.min_bound, strong_grid_bound=args.strong_bound)
    rows = property_matrix(ids, budget)
    if (args.format or "table") == "table":
        text = _render_table(rows, ids)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return EXIT_OK
    emit([{"index": r.index_id, "property": r.property, "verdict": r.verdict, "mark": r.mark,
           "bound": r.search_bound, "value": r.value, "note": r.note, "witness": r.witness} for r in rows],
         args, ["index", "property", "verdict", "mark", "bound", "value", "note", "witness"])
    return EXIT_OK


def cmd_baseline_tests(args) -> int:
    ids = _ids(args.indices, DEFAULT_STAT_IDS)
    reports = baseline_suite(ids, _ints(args.n_values), r=args.r, seed=args.seed,
                             selection=not args.no_selection)
    emit([r.row() for r in reports], args,
         ["test", "index", "n", "specs", "combines", "r", "seed", "statistic", "p", "reject"])
    return EXIT_OK


def _reference(args):
    return read_partition(args.ref) if args.ref else load_reference_fixture()


def cmd_k_scan(args) -> int:
    ref = _reference(args)
    curves = k_scan(ref, _ints(args.k_values), _ids(args.indices, SCAN_IDS), args.samples or 200, args.seed)
    emit([row for c in curves for row in c.rows()], args)
    return EXIT_OK


def cmd_s_scan(args) -> int:
    ref = _reference(args)
    curves = s_scan(ref, _ints(args.s_values), _ids(args.indices, SCAN_IDS), args.samples or 200, args.seed)
    emit([row for c in curves for row in c.rows()], args)
    return EXIT_OK


def cmd_indices_list(args) -> int:
    rows = [{"id": d.id, "name": d.name, "family": d.family, "higher_is_better": d.higher_is_better,
             "c_max": d.c_max, "c_min": d.c_min, "c_base": d.c_base, "equivalence_rep": d.equivalence_rep,
             "needs_sampling": d.needs_sampling, "linear_complexity": d.linear_complexity}
            for d in ix.index_registry()]
    emit(rows, args)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--indices", help="comma-separated index ids (see 'indices list')")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, help="Monte Carlo samples / draws per point")
    common.add_argument("--n-max", type=int, dest="n_max")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json", "table"))
    common.add_argument("--mode", choices=("auto", "exact", "monte-carlo"), default="auto",
                        help="how AMI/SMI null moments are computed")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="clustersim", description="Cluster similarity indices and their properties.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("score", parents=[common], help="score a candidate partition against a reference")
    s.add_argument("reference")
    s.add_argument("candidate")
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("matrix", parents=[common], help="scores for every ordered pair of partitions")
    s.add_argument("partitions", nargs="+")
    s.set_defaults(func=cmd_matrix)

    s = sub.add_parser("triplets", parents=[common], help="pairwise index inconsistency over triplets")
    s.add_argument("manifest")
    s.set_defaults(func=cmd_triplets)

    s = sub.add_parser("find-cover", parents=[common], help="search a small set of triplets separating all index pairs")
    s.add_argument("--budget", type=float, default=600.0, help="seconds")
    s.add_argument("--max-size", type=int, default=4)
    s.add_argument("--out-dir", help="also write the triplets as partition files plus a manifest")
    s.set_defaults(func=cmd_find_cover)

    s = sub.add_parser("properties", parents=[common], help="property matrix with witnesses")
    s.add_argument("--n-max-sampled", type=int, default=4, help="n bound for AMI/SMI")
    s.add_argument("--min-bound", type=int, default=200, help="pair-count bound for minimal agreement")
    s.add_argument("--strong-bound", type=int, default=20, help="pair-count bound for strong monotonicity")
    s.set_defaults(func=cmd_properties)

    s = sub.add_parser("baseline-tests", parents=[common], help="ANOVA / selection tests with Fisher combination")
    s.add_argument("--n-values", default="50,100,150,200")
    s.add_argument("--r", type=int, default=100)
    s.add_argument("--no-selection", action="store_true")
    s.set_defaults(func=cmd_baseline_tests)

    e = sub.add_parser("experiment", help="bias scans").add_subparsers(dest="experiment", required=True,
                                                                       parser_class=_Parser)
    s = e.add_parser("k-scan", parents=[common], help="balanced candidates with k clusters")
    s.add_argument("--ref", help="reference partition file (default: bundled n=924 fixture)")
    s.add_argument("--k-values", default=",".join(map(str, K_VALUES)))
    s.set_defaults(func=cmd_k_scan)
    s = e.add_parser("s-scan", parents=[common], help="31 clusters of size s plus one large cluster")
    s.add_argument("--ref", help="reference partition file (default: bundled n=924 fixture)")
    s.add_argument("--s-values", default=",".join(map(str, S_VALUES)))
    s.set_defaults(func=cmd_s_scan)

    i = sub.add_parser("indices", help="index catalogue").add_subparsers(dest="action", required=True,
                                                                        parser_class=_Parser)
    s = i.add_parser("list", parents=[common])
    s.set_defaults(func=cmd_indices_list)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits on usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"clustersim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"clustersim: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
