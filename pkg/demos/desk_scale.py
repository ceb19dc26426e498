"""Time materialization and single-fact retraction on a generated component forest."""

import argparse
import random
import statistics
import time

from capakb import KnowledgeBase
from capakb.fixtures import component_forest


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--edges", type=int, default=50_000)
    parser.add_argument("--retracts", type=int, default=21)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    start = time.perf_counter()
    kb = KnowledgeBase.from_documents(component_forest(edge_count=args.edges, seed=args.seed))
    print(f"load         {time.perf_counter() - start:7.2f}s  {len(kb.store)} asserted")

    stats = kb.materialize()
    print(f"materialize  {stats.elapsed:7.2f}s  {stats.derived_count} derived, {stats.iterations} iterations")

    hc = kb.id("ex:hasComponent")
    edges = sorted(t for t in kb.store.match(p=hc) if kb.store.is_asserted(t))
    timings = []
    for t in random.Random(args.seed).sample(edges, args.retracts):
        start = time.perf_counter()
        kb.retract_fact(t)
        timings.append((time.perf_counter() - start) * 1000)
    # the first retract also builds the reverse provenance index
    print(f"retract      first {timings[0]:.1f}ms, median {statistics.median(timings):.2f}ms over {len(timings)}")


if __name__ == "__main__":
    main()
