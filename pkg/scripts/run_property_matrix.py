"""Print the two property tables as check marks, with one witness per violated cell."""

import argparse
import time

from clustersim import properties as pr

GENERAL = ("nmi", "nmi_max", "fnmi", "vi", "smi", "fmeasure", "bcubed", "ami")
PAIR = ("rand", "adjusted_rand", "jaccard", "wallace_1", "dice",
        "correlation_coefficient", "sokal_sneath_1", "correlation_distance")

SHORT = {"max_agreement": "Max", "min_agreement": "Min", "symmetry": "Sym", "distance": "Dist",
         "linear_complexity": "Lin", "monotonicity": "Mono", "strong_monotonicity": "Strong",
         "constant_baseline_exact": "Const", "constant_baseline_asymptotic": "AsConst", "bias": "Bias"}


def table(rows, ids, props):
    by = {(r.index_id, r.property): r for r in rows}
    width = max(map(len, ids))
    print(" " * width + "  " + " ".join(SHORT.get(p, p[:8]).ljust(8) for p in props))
    for i in ids:
        print(i.ljust(width) + "  " + " ".join(by[(i, p)].mark.ljust(8) for p in props))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=6)
    ap.add_argument("--witnesses", action="store_true", help="also print violation witnesses")
    args = ap.parse_args()

    t0 = time.perf_counter()
    rows = pr.property_matrix(GENERAL + PAIR, pr.PropertyBudget(n_max=args.n_max))
    print(f"computed in {time.perf_counter() - t0:.0f}s\n")
    table(rows, GENERAL, pr.TABLE1_PROPERTIES)
    print()
    table(rows, PAIR, pr.TABLE2_PROPERTIES + ("bias",))
    if args.witnesses:
        print()
        for r in rows:
            if r.verdict == pr.VIOLATED:
                print(f"{r.index_id}/{r.property}: {r.witness or r.note}")


if __name__ == "__main__":
    main()
