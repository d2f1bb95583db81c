from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from paradox_lab.cards import (
    FACES,
    STANDARD_DECK,
    SUITS,
    Attribute,
    Card,
    CardExperiment,
    GameState,
    ValuePartition,
    make_deck,
    observe,
    post_select,
    prepare,
    run_card_experiment,
    sample_card_run,
    swap_suits,
)
from paradox_lab.errors import EmptyPile, ImpossiblePreparation, ValidationError
from paradox_lab.probability import RandomSource
from oracles import binomial_bound, card_oracle

FACE, SUIT = Attribute.FACE, Attribute.SUIT
LOOK_S = ValuePartition.look(SUIT, "S")
LOOK_D = ValuePartition.look(SUIT, "D")
FINE_SUIT = ValuePartition.fine(SUIT)
DECK_STRS = ["QS", "QD", "KH", "KH", "JS", "JD"]


def deck(*cards):
    return make_deck(cards)


def oracle_look(p: ValuePartition):
    return (p.attribute.value, dict(zip(p.labels, map(set, p.cells))))


def nonzero(joint):
    return {k: v for k, v in joint.items() if v}


def test_card_parsing_and_str():
    assert str(Card.parse("KH")) == "KH"
    with pytest.raises(ValidationError):
        Card.parse("XS")
    with pytest.raises(ValidationError):
        Card.parse("KHS")
    assert STANDARD_DECK == deck(*DECK_STRS)


def test_prepare_q():
    s = prepare(STANDARD_DECK, FACE, {"Q"})
    assert s.these == deck("QS", "QD")
    assert s.others == deck("KH", "KH", "JS", "JD")
    assert s.last is FACE


def test_prepare_not_j():
    s = prepare(STANDARD_DECK, "Face", {"Q", "K"})
    assert s.these == deck("QS", "QD", "KH", "KH")
    assert s.others == deck("JS", "JD")


def test_prepare_full_range():
    s = prepare(STANDARD_DECK, SUIT, set(SUITS))
    assert s.these == STANDARD_DECK and s.others == ()


def test_prepare_errors():
    with pytest.raises(ImpossiblePreparation):
        prepare(deck("QS", "QD"), FACE, {"K"})
    with pytest.raises(ValidationError):
        prepare(STANDARD_DECK, FACE, {"S"})


def test_observe_look_for_s_after_q():
    s = prepare(STANDARD_DECK, FACE, {"Q"})
    out = dict(observe(s, LOOK_S).entries)
    yes = GameState(deck("QS", "JS"), deck("QD", "KH", "KH", "JD"), SUIT)
    no = GameState(deck("QD", "KH", "KH", "JD"), deck("QS", "JS"), SUIT)
    assert out == {("yes", yes): F(1, 4), ("no", no): F(3, 4)}


def test_observe_fine_suit_after_q():
    s = prepare(STANDARD_DECK, FACE, {"Q"})
    labels = observe(s, FINE_SUIT).map(lambda o: o[0]).as_dict()
    assert labels == {"S": F(1, 4), "D": F(1, 4), "H": F(1, 2)}


def test_observe_empty_pile():
    s = prepare(STANDARD_DECK, SUIT, set(SUITS))
    # same attribute draws from These, which is full
    assert observe(s, LOOK_S).map(lambda o: o[0]).as_dict() == {"yes": F(1, 3), "no": F(2, 3)}
    with pytest.raises(EmptyPile):
        observe(s, ValuePartition.look(FACE, "K"))


def test_post_select_examples():
    s = prepare(STANDARD_DECK, FACE, {"Q"})
    after = dict(observe(s, LOOK_S).entries)
    yes_state = next(st for (lab, st) in after if lab == "yes")
    no_state = next(st for (lab, st) in after if lab == "no")
    p, passed = post_select(yes_state, FACE, "K")
    assert p == F(1, 2)
    assert passed == GameState(deck("KH", "KH"), deck("QS", "QD", "JS", "JD"), FACE)
    assert post_select(no_state, FACE, "K") == (F(0), None)
    assert post_select(s, FACE, "Q")[0] == 1


@pytest.mark.parametrize(
    "prep, looks, expected_pass",
    [
        ((FACE, {"Q"}), [LOOK_S], F(1, 8)),
        ((FACE, {"Q"}), [LOOK_D], F(1, 8)),
        ((FACE, {"Q", "K"}), [LOOK_S], F(1, 4)),
        ((FACE, {"Q", "K"}), [], F(1, 2)),
        ((FACE, {"Q"}), [], F(0)),
        ((FACE, {"Q"}), [FINE_SUIT], F(1, 4)),
    ],
)
def test_run_matches_brute_force(prep, looks, expected_pass):
    report = run_card_experiment(STANDARD_DECK, prep, looks, (FACE, "K"))
    oracle = card_oracle(DECK_STRS, prep[0].value, prep[1], [oracle_look(p) for p in looks], "Face", "K")
    assert nonzero(report.joint) == nonzero(oracle)
    assert report.p_pass() == expected_pass


def test_run_conditionals():
    r = run_card_experiment(STANDARD_DECK, (FACE, {"Q"}), [LOOK_S], (FACE, "K"))
    assert r.conditional(("yes",)) == 1
    assert run_card_experiment(STANDARD_DECK, (FACE, {"Q"}), [LOOK_D], (FACE, "K")).conditional(("yes",)) == 1
    assert run_card_experiment(STANDARD_DECK, (FACE, {"Q", "K"}), [LOOK_S], (FACE, "K")).conditional(("yes",)) == 1
    fine = run_card_experiment(STANDARD_DECK, (FACE, {"Q"}), [FINE_SUIT], (FACE, "K"))
    assert fine.conditional(("S",)) == F(1, 2)


def test_run_reports_empty_pile_branch():
    whole = ValuePartition(SUIT, (frozenset(SUITS),), ("any",))
    with pytest.raises(EmptyPile) as info:
        run_card_experiment(STANDARD_DECK, (FACE, {"Q"}), [whole, ValuePartition.look(FACE, "K")], (FACE, "K"))
    assert info.value.branch == ("any",)


def test_impossibility_invariant_standard_scenarios():
    for prep in ({"Q"}, {"Q", "K"}):
        for look in (LOOK_S, LOOK_D):
            r = run_card_experiment(STANDARD_DECK, (FACE, prep), [look], (FACE, "K"))
            assert r.branch_pass_probability(("no",)) == 0


def test_s_d_symmetry():
    swapped = make_deck(swap_suits(c) for c in STANDARD_DECK)
    assert swapped == STANDARD_DECK
    r_s = run_card_experiment(STANDARD_DECK, (FACE, {"Q"}), [LOOK_S], (FACE, "K"))
    r_d = run_card_experiment(swapped, (FACE, {"Q"}), [LOOK_D], (FACE, "K"))
    assert r_s.joint == r_d.joint and r_s.conditionals == r_d.conditionals


def test_no_pre_observation_suit_value():
    s = prepare(STANDARD_DECK, FACE, {"Q"})
    support = observe(s, FINE_SUIT).map(lambda o: o[0]).support()
    assert len(support) == 3


# -- random reachable states -----------------------------------------------

cards = st.builds(Card, st.sampled_from(FACES), st.sampled_from(SUITS))


@st.composite
def value_partitions(draw):
    attribute = draw(st.sampled_from([FACE, SUIT]))
    values = attribute.values
    kind = draw(st.sampled_from(["look", "fine", "random"]))
    if kind == "look":
        return ValuePartition.look(attribute, draw(st.sampled_from(values)))
    if kind == "fine":
        return ValuePartition.fine(attribute)
    assignment = draw(st.lists(st.integers(0, 2), min_size=3, max_size=3))
    cells: dict[int, set[str]] = {}
    for v, c in zip(values, assignment):
        cells.setdefault(c, set()).add(v)
    return ValuePartition(attribute, tuple(frozenset(c) for _, c in sorted(cells.items())))


@st.composite
def reachable_states(draw):
    d = make_deck(draw(st.lists(cards, min_size=1, max_size=8)))
    attribute = draw(st.sampled_from([FACE, SUIT]))
    present = sorted({c.value(attribute) for c in d})
    values = draw(st.sets(st.sampled_from(attribute.values), min_size=1))
    assume(values & set(present))
    state = prepare(d, attribute, values)
    for _ in range(draw(st.integers(0, 4))):
        p = draw(value_partitions())
        if not state.pile_for(p.attribute):
            continue
        branches = observe(state, p).entries
        (_, state), _ = branches[draw(st.integers(0, len(branches) - 1))]
    return d, state


@settings(max_examples=200)
@given(reachable_states(), value_partitions())
def test_repeatability_and_conservation(ds, p):
    d, state = ds
    assert make_deck(state.these + state.others) == d
    assert state.these
    if not state.pile_for(p.attribute):
        with pytest.raises(EmptyPile):
            observe(state, p)
        return
    out = observe(state, p)
    assert sum(w for _, w in out) == 1
    for (label, after), _ in out:
        assert make_deck(after.these + after.others) == d
        again = observe(after, p)
        assert [lab for (lab, _), _ in again] == [label]


@st.composite
def experiments(draw):
    d = make_deck(draw(st.lists(cards, min_size=2, max_size=7)))
    prep_attr = draw(st.sampled_from([FACE, SUIT]))
    values = draw(st.sets(st.sampled_from(prep_attr.values), min_size=1))
    assume(any(c.value(prep_attr) in values for c in d))
    looks = draw(st.lists(value_partitions(), max_size=2))
    post_attr = draw(st.sampled_from([FACE, SUIT]))
    return d, (prep_attr, values), looks, (post_attr, draw(st.sampled_from(post_attr.values)))


@settings(max_examples=150)
@given(experiments())
def test_random_experiments_match_brute_force(exp):
    d, prep, looks, post = exp
    try:
        report = run_card_experiment(d, prep, looks, post)
    except EmptyPile:
        with pytest.raises(AssertionError, match="empty pile"):
            card_oracle([str(c) for c in d], prep[0].value, prep[1], [oracle_look(p) for p in looks], post[0].value, post[1])
        return
    oracle = card_oracle([str(c) for c in d], prep[0].value, prep[1], [oracle_look(p) for p in looks], post[0].value, post[1])
    assert nonzero(report.joint) == nonzero(oracle)
    assert sum(report.joint.values()) == 1


# -- sampling ----------------------------------------------------------------

STANDARD_EXP = CardExperiment(STANDARD_DECK, (FACE, frozenset({"Q"})), (LOOK_S,), (FACE, "K"))


def test_sampled_run_deterministic():
    a = [sample_card_run(STANDARD_EXP, rng) for rng in [RandomSource(11)] for _ in range(500)]
    rng = RandomSource(11)
    b = [sample_card_run(STANDARD_EXP, rng) for _ in range(500)]
    assert a == b


def test_sampled_pass_frequency_and_certainty():
    n = 100_000
    rng = RandomSource(0)
    runs = [sample_card_run(STANDARD_EXP, rng) for _ in range(n)]
    passing = [r for r in runs if r.passed]
    assert abs(len(passing) / n - 1 / 8) <= binomial_bound(1 / 8, n)
    assert passing and all(r.outcomes == ("yes",) for r in passing)


def test_sampled_empty_pile():
    exp = CardExperiment(STANDARD_DECK, (SUIT, frozenset(SUITS)), (ValuePartition.look(FACE, "K"),), (FACE, "K"))
    with pytest.raises(EmptyPile):
        sample_card_run(exp, RandomSource(0))
