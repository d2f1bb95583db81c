"""Classical three-box analog played with a partial deck of cards.

The deck is split into two piles, These and Others. To observe an attribute
(Face or Suit) a card is picked uniformly at random: from These if the
attribute is the same as the last one observed, from Others otherwise. The
outcome is the cell of the partition holding the picked card's value, and
afterwards These holds every card of the deck whose value lies in that cell.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import EmptyPile, ImpossiblePreparation, ValidationError
from .probability import Dist, RandomSource, merge
from .report import ScenarioReport

FACES = ("K", "Q", "J")
SUITS = ("S", "D", "H")


class Attribute(enum.Enum):
    FACE = "Face"
    SUIT = "Suit"

    @property
    def values(self) -> tuple[str, ...]:
        return FACES if self is Attribute.FACE else SUITS

    @classmethod
    def parse(cls, name: str | Attribute) -> Attribute:
        if isinstance(name, Attribute):
            return name
        for a in cls:
            if a.value.lower() == str(name).lower():
                return a
        raise ValidationError(f"unknown attribute {name!r}; expected Face or Suit")


@dataclass(frozen=True, order=True)
class Card:
    face: str
    suit: str

    def __post_init__(self) -> None:
        if self.face not in FACES or self.suit not in SUITS:
            raise ValidationError(f"not a card: {self.face}{self.suit}")

    @classmethod
    def parse(cls, text: str) -> Card:
        if len(text) != 2:
            raise ValidationError(f"cards are two characters like 'QS', got {text!r}")
        return cls(text[0], text[1])

    def value(self, attribute: Attribute) -> str:
        return self.face if attribute is Attribute.FACE else self.suit

    def __str__(self) -> str:
        return self.face + self.suit


Deck = tuple[Card, ...]


def make_deck(cards: Iterable[Card | str]) -> Deck:
    """Canonical (sorted) multiset of cards."""
    deck = tuple(sorted(c if isinstance(c, Card) else Card.parse(c) for c in cards))
    if not deck:
        raise ValidationError("deck is empty")
    return deck


STANDARD_DECK: Deck = make_deck(["QS", "QD", "KH", "KH", "JS", "JD"])


@dataclass(frozen=True)
class ValuePartition:
    attribute: Attribute
    cells: tuple[frozenset[str], ...]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        attribute = Attribute.parse(self.attribute)
        cells = tuple(frozenset(c) for c in self.cells)
        labels = tuple(self.labels) or tuple("+".join(v for v in attribute.values if v in c) for c in cells)
        covered: set[str] = set()
        for c in cells:
            if not c:
                raise ValidationError("partition cells must be nonempty")
            if covered & c:
                raise ValidationError(f"cells overlap on {sorted(covered & c)}")
            covered |= c
        if covered != set(attribute.values):
            raise ValidationError(f"cells {sorted(covered)} do not cover {attribute.value} values")
        if len(labels) != len(cells) or len(set(labels)) != len(labels):
            raise ValidationError(f"need one distinct label per cell, got {labels}")
        object.__setattr__(self, "attribute", attribute)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def look(cls, attribute: Attribute | str, value: str) -> ValuePartition:
        """Binary 'is it ``value``?' observation, the analog of opening one box."""
        attribute = Attribute.parse(attribute)
        if value not in attribute.values:
            raise ValidationError(f"{value!r} is not a {attribute.value} value")
        rest = frozenset(attribute.values) - {value}
        return cls(attribute, (frozenset({value}), rest), ("yes", "no"))

    @classmethod
    def fine(cls, attribute: Attribute | str) -> ValuePartition:
        attribute = Attribute.parse(attribute)
        return cls(attribute, tuple(frozenset({v}) for v in attribute.values), attribute.values)

    def cell_of(self, value: str) -> tuple[str, frozenset[str]]:
        for label, cell in zip(self.labels, self.cells):
            if value in cell:
                return label, cell
        raise ValidationError(f"value {value!r} not covered")  # excluded by __post_init__


@dataclass(frozen=True)
class GameState:
    these: Deck
    others: Deck
    last: Attribute

    @property
    def deck(self) -> Deck:
        return tuple(sorted(self.these + self.others))

    def pile_for(self, attribute: Attribute) -> Deck:
        return self.these if attribute is self.last else self.others

    def __str__(self) -> str:
        fmt = lambda cards: "{" + ",".join(map(str, cards)) + "}"
        return f"These={fmt(self.these)} Others={fmt(self.others)} last={self.last.value}"


def _split(deck: Deck, attribute: Attribute, values: Iterable[str]) -> GameState:
    values = set(values)
    these = tuple(c for c in deck if c.value(attribute) in values)
    others = tuple(c for c in deck if c.value(attribute) not in values)
    return GameState(these, others, attribute)


def prepare(deck: Iterable[Card | str], attribute: Attribute | str, values: Iterable[str]) -> GameState:
    """Impose a value set: matching cards go to These, the rest to Others."""
    deck = make_deck(deck)
    attribute = Attribute.parse(attribute)
    values = set(values)
    unknown = values - set(attribute.values)
    if unknown:
        raise ValidationError(f"{sorted(unknown)} are not {attribute.value} values")
    state = _split(deck, attribute, values)
    if not state.these:
        raise ImpossiblePreparation(f"no card with {attribute.value} in {sorted(values)}")
    return state


def observe(state: GameState, partition: ValuePartition) -> Dist[tuple[str, GameState]]:
    """Exact law of (outcome label, next state) for one observation."""
    pile = state.pile_for(partition.attribute)
    if not pile:
        which = "These" if partition.attribute is state.last else "Others"
        raise EmptyPile(f"{which} is empty for a {partition.attribute.value} observation")
    deck = state.deck
    picks = []
    for card in pile:
        label, cell = partition.cell_of(card.value(partition.attribute))
        picks.append(((label, _split(deck, partition.attribute, cell)), Fraction(1, len(pile))))
    return merge(Dist(tuple(picks)))


def post_select(
    state: GameState, attribute: Attribute | str, value: str
) -> tuple[Fraction, GameState | None]:
    """Fine observation of ``attribute``; passes iff the picked card shows ``value``."""
    attribute = Attribute.parse(attribute)
    if value not in attribute.values:
        raise ValidationError(f"{value!r} is not a {attribute.value} value")
    outcomes = observe(state, ValuePartition.fine(attribute))
    for (label, next_state), w in outcomes:
        if label == value:
            return w, next_state
    return Fraction(0), None


@dataclass(frozen=True)
class CardExperiment:
    deck: Deck
    prep: tuple[Attribute, frozenset[str]]
    looks: tuple[ValuePartition, ...]
    post: tuple[Attribute, str]

    def __post_init__(self) -> None:
        attr, values = self.prep
        object.__setattr__(self, "deck", make_deck(self.deck))
        object.__setattr__(self, "prep", (Attribute.parse(attr), frozenset(values)))
        object.__setattr__(self, "looks", tuple(self.looks))
        post_attr, post_value = self.post
        post_attr = Attribute.parse(post_attr)
        if post_value not in post_attr.values:
            raise ValidationError(f"{post_value!r} is not a {post_attr.value} value")
        object.__setattr__(self, "post", (post_attr, post_value))

    def initial_state(self) -> GameState:
        return prepare(self.deck, *self.prep)


def card_branches(exp: CardExperiment) -> Dist[tuple[tuple[str, ...], GameState]]:
    """Exact distribution over (look outcomes, state before post-selection)."""
    current = Dist.point(((), exp.initial_state()))
    for partition in exp.looks:
        out = []
        for (labels, state), w in current:
            try:
                step = observe(state, partition)
            except EmptyPile as exc:
                raise EmptyPile(exc.reason, labels) from None
            out.extend(((labels + (label,), nxt), w * v) for (label, nxt), v in step)
        current = merge(Dist(tuple(out)))
    return current


def run_card_experiment(
    deck: Iterable[Card | str],
    prep: tuple[Attribute | str, Iterable[str]],
    looks: Sequence[ValuePartition],
    post: tuple[Attribute | str, str],
    name: str = "card",
    metadata: dict | None = None,
) -> ScenarioReport:
    exp = CardExperiment(make_deck(deck), (prep[0], frozenset(prep[1])), tuple(looks), post)
    return run_card(exp, name, metadata)


def run_card(exp: CardExperiment, name: str = "card", metadata: dict | None = None) -> ScenarioReport:
    branches = card_branches(exp)

    def pass_probability(state: GameState) -> Fraction:
        return post_select(state, *exp.post)[0]

    for (labels, state), _ in branches:
        try:
            pass_probability(state)
        except EmptyPile as exc:
            raise EmptyPile(exc.reason, labels) from None
    return ScenarioReport.from_branches("card", name, branches, pass_probability, metadata)


@dataclass(frozen=True)
class CardRun:
    outcomes: tuple[str, ...]
    passed: bool
    picks: tuple[Card, ...]


def _pick(state: GameState, attribute: Attribute, rng: RandomSource, branch: tuple[str, ...]) -> Card:
    pile = state.pile_for(attribute)
    if not pile:
        raise EmptyPile(f"designated pile empty for a {attribute.value} observation", branch)
    return pile[rng.randrange(len(pile))]


def sample_card_run(exp: CardExperiment, rng: RandomSource) -> CardRun:
    """Play the game once with physical picks (independent of :func:`observe`)."""
    state = exp.initial_state()
    deck = state.deck
    outcomes: list[str] = []
    picks: list[Card] = []
    for partition in exp.looks:
        card = _pick(state, partition.attribute, rng, tuple(outcomes))
        label, cell = partition.cell_of(card.value(partition.attribute))
        state = _split(deck, partition.attribute, cell)
        outcomes.append(label)
        picks.append(card)
    post_attr, post_value = exp.post
    card = _pick(state, post_attr, rng, tuple(outcomes))
    picks.append(card)
    return CardRun(tuple(outcomes), card.value(post_attr) == post_value, tuple(picks))


def swap_suits(card: Card, a: str = "S", b: str = "D") -> Card:
    swap = {a: b, b: a}
    return Card(card.face, swap.get(card.suit, card.suit))
