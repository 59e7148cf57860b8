"""Randomized search over the sign patterns whose 2-goodness is not settled by reduction.

For each Unknown pattern of the given class (leading signs positive), run a
2x2 search with unit-magnitude exponents and report the best margin and any
certified counterexample. A clean run is evidence, not a proof.

    python scripts/search_unknown_patterns.py --class 4 --trials 20000
"""
import argparse
import json

from gwords.reduction import Status, classify, reduced_class
from gwords.search import SearchConfig, random_search
from gwords.suites import normalized_patterns
from gwords.words import format_word


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--class", dest="N", type=int, default=3)
    ap.add_argument("--trials", type=int, default=5000)
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--refine", action="store_true")
    args = ap.parse_args(argv)

    rows = []
    for seq in normalized_patterns(args.N):
        if classify(seq).verdict is not Status.UNKNOWN:
            continue
        res = random_search(seq, SearchConfig(n=args.n, trials=args.trials, seed=args.seed,
                                              refine=args.refine))
        rows.append({"sequence": format_word(seq), "m": reduced_class(seq).m,
                     "best_margin": res.best_margin, "rejected_hits": res.rejected_hits,
                     "witness": None if res.witness is None else res.witness.to_dict()})
        flag = "COUNTEREXAMPLE" if res.witness is not None else "clean"
        print(f"{format_word(seq):40s} m={rows[-1]['m']}  best margin {res.best_margin:.3e}  {flag}")
    print(json.dumps({"class": args.N, "patterns": len(rows),
                      "counterexamples": sum(r["witness"] is not None for r in rows)}))


if __name__ == "__main__":
    main()
