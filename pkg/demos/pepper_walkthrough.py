"""Classify Pepper, explain one capability, then take a component away."""

from capakb import capabilities_of, explain
from capakb.fixtures import pepper_kb
from capakb.query import format_tree


def show_capabilities(kb, heading):
    report = capabilities_of(kb, kb.id("ex:pepper"))
    print(f"{heading}: {', '.join(sorted(kb.name(c) for c in report.defined)) or '(none)'}")


def main():
    kb = pepper_kb()
    stats = kb.rebuild()
    print(f"materialized in {stats.iterations} iterations, {stats.derived_count} derived facts")
    show_capabilities(kb, "capabilities")

    print("\nwhy ObjectLocalisationCapa?")
    print(format_tree(kb, explain(kb, kb.triple("ex:pepper_capa", "a", "ex:ObjectLocalisationCapa"))))

    print("\nthe tracker fails")
    delta = kb.retract_fact(kb.triple("ex:pepper", "ex:hasComponent", "ex:artrack"))
    print(f"removed {len(delta.removed)}, rederived {len(delta.rederived)}")
    show_capabilities(kb, "capabilities")

    delta = kb.assert_fact(kb.triple("ex:pepper", "ex:hasComponent", "ex:artrack"))
    print(f"\ntracker back: added {len(delta.added)}")
    show_capabilities(kb, "capabilities")


if __name__ == "__main__":
    main()
