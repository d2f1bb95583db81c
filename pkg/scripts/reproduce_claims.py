"""Print the headline conditional probabilities of every engine, exactly where possible."""

from __future__ import annotations

from paradox_lab.analogs import LSOperation, run_adhoc, run_lsbox
from paradox_lab.cards import STANDARD_DECK, Attribute, ValuePartition, run_card_experiment
from paradox_lab.quantum import three_box, run_pps
from paradox_lab.slits import SlitGeometry, coincidence_experiment, map_to_threebox

FACE, SUIT = Attribute.FACE, Attribute.SUIT
POST_K = (FACE, "K")


def row(label: str, value) -> None:
    print(f"  {label:<44s} {value}")


def main() -> None:
    print("quantum three-box, pre (1,1,1), post (1,1,-1)")
    for box in ("p1", "p2"):
        r = run_pps(three_box(box))
        row(f"open {box}: P(found and pass)", r.joint_prob(("found",), True))
        row(f"open {box}: P(found | pass)", r.conditional(("found",)))
    row("no stage: P(pass)", run_pps(three_box(None)).p_pass())

    print("\ncard game, deck " + " ".join(map(str, STANDARD_DECK)))
    cases = [
        ("prep Q, look S", {"Q"}, [ValuePartition.look(SUIT, "S")]),
        ("prep Q, look D", {"Q"}, [ValuePartition.look(SUIT, "D")]),
        ("prep not-J, look S", {"Q", "K"}, [ValuePartition.look(SUIT, "S")]),
        ("prep Q, fine suit", {"Q"}, [ValuePartition.fine(SUIT)]),
    ]
    for label, prep, looks in cases:
        r = run_card_experiment(STANDARD_DECK, (FACE, prep), looks, POST_K)
        first = looks[0].labels[0]
        row(f"{label}: P(pass)", r.p_pass())
        row(f"{label}: P({first} | pass)", r.conditional((first,)))
    for label, prep in (("prep Q", {"Q"}), ("prep not-J", {"Q", "K"})):
        row(f"{label}, no look: P(pass)", run_card_experiment(STANDARD_DECK, (FACE, prep), [], POST_K).p_pass())

    print("\nad hoc three-box (uniform start)")
    for box in (1, 2):
        r = run_adhoc(box)
        row(f"open {box}: P(pass), P(found | pass)", f"{r.p_pass()}, {r.conditional(('found',))}")

    print("\nbox with a real ball: tilt Left, shake Left, tilt Left")
    ops = [LSOperation("tilt", "Left"), LSOperation("shake", "Left"), LSOperation("tilt", "Left")]
    r = run_lsbox(ops)
    for labels in r.outcome_sequences():
        row(" > ".join(labels), r.joint_prob(labels, True))

    print("\nthree slits, a = 1000, lambda = 1")
    g = SlitGeometry.solved(1000.0, 1.0)
    row("solved L", g.L)
    for d in (1, 2):
        c = coincidence_experiment(g, d)
        row(f"d at slit {d}: P(D and d), P(D and not d)", f"{c.p_D_and_fired:.12f}, {c.p_D_and_silent:.3g}")
    row("no detector: P(D)", f"{coincidence_experiment(g, None).p_D:.12f}")
    row("post-selection ray", map_to_threebox(g))


if __name__ == "__main__":
    main()
