"""Print the full probability tree of a card-game experiment.

    python scripts/card_tree.py            # prepare Q, look for S, post-select K
    python scripts/card_tree.py --prep Q K --look D
"""

from __future__ import annotations

import argparse

from paradox_lab.cards import (
    STANDARD_DECK,
    Attribute,
    ValuePartition,
    make_deck,
    observe,
    post_select,
    prepare,
)


def fmt(state) -> str:
    these = " ".join(map(str, state.these)) or "-"
    others = " ".join(map(str, state.others)) or "-"
    return f"These [{these}]  Others [{others}]"


def main(argv: list[str] | None = None) -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--deck", nargs="+", default=[str(c) for c in STANDARD_DECK])
    ap.add_argument("--prep", nargs="+", default=["Q"], help="prepared face values")
    ap.add_argument("--look", default="S", help="suit to look for, or 'fine'")
    ap.add_argument("--post", default="K", help="face value to post-select")
    args = ap.parse_args(argv)

    state = prepare(make_deck(args.deck), Attribute.FACE, set(args.prep))
    look = (
        ValuePartition.fine(Attribute.SUIT)
        if args.look == "fine"
        else ValuePartition.look(Attribute.SUIT, args.look)
    )
    print(f"prepare {'/'.join(args.prep)}: {fmt(state)}")
    total = 0
    for (label, after), w in observe(state, look):
        p, passed = post_select(after, Attribute.FACE, args.post)
        total += w * p
        print(f"  {label:<4s} {str(w):>5s}  {fmt(after)}")
        print(f"       post {args.post}: {p}" + (f"  -> {fmt(passed)}" if passed else ""))
        print(f"       joint with pass: {w * p}")
    print(f"P(pass) = {total}")


if __name__ == "__main__":
    main()
