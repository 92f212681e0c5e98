"""Utterance rendering and the template-inverse parser."""

import random

import pytest

from seatbench.constraints import (
    ALL_KINDS,
    CONFLICT_KINDS,
    SOCIAL_RELATION_KINDS,
    Conflict,
    conflict_compatible,
    constraint_id,
    make_preference,
)
from seatbench.dialogue import (
    ADVERB_STRENGTH,
    STRENGTH_ADVERB,
    TEMPLATE_PACK,
    UtteranceParseError,
    parse_utterance,
    render_utterance,
)
from seatbench.world import relation_between


def _sample_constraint(world, kind, strength):
    if kind in CONFLICT_KINDS:
        for rel in world.relationships:
            if conflict_compatible(world, rel.a, rel.b, kind):
                return Conflict(a=rel.a, b=rel.b, kind=kind, strength=strength)
        raise AssertionError(f"no compatible pair for {kind}")
    owner = world.residents[0].id
    return make_preference(owner, kind, strength)


def test_every_kind_has_three_templates():
    assert set(TEMPLATE_PACK) == set(ALL_KINDS)
    for kind, templates in TEMPLATE_PACK.items():
        assert len(templates) >= 3, kind
        assert len(set(templates)) == len(templates)


def test_adverb_mapping_is_bijective():
    assert STRENGTH_ADVERB == {1: "slightly", 2: "quite", 3: "absolutely"}
    assert {v: k for k, v in STRENGTH_ADVERB.items()} == ADVERB_STRENGTH


def test_render_produces_full_sentences(world):
    rng = random.Random(0)
    for kind in ALL_KINDS:
        text = render_utterance(_sample_constraint(world, kind, 2), world, rng)
        assert text[0].isupper() or text.startswith("I ")
        assert text.endswith(".")
        assert "{" not in text and "}" not in text


def test_round_trip_all_kinds_and_strengths(world):
    for kind in ALL_KINDS:
        for strength in (1, 2, 3):
            original = _sample_constraint(world, kind, strength)
            speaker = original.a if isinstance(original, Conflict) else original.owner
            for seed in range(10):
                text = render_utterance(original, world, random.Random(seed))
                parsed = parse_utterance(text, world, speaker)
                assert constraint_id(parsed) == constraint_id(original)
                assert parsed.strength == strength


def test_template_choice_varies_with_rng(world):
    c = make_preference(world.residents[0].id, "near_window", 2)
    texts = {render_utterance(c, world, random.Random(s)) for s in range(20)}
    assert len(texts) >= 2


def test_parse_rejects_garbage(world):
    with pytest.raises(UtteranceParseError):
        parse_utterance("The weather is lovely today.", world, "r001")


def test_parse_error_reports_matched_prefix(world):
    # A truncated known template should yield a non-empty matched prefix.
    text = "I absolutely must be able to see the"
    with pytest.raises(UtteranceParseError) as exc:
        parse_utterance(text, world, "r001")
    assert exc.value.matched_prefix


def test_parse_conflict_unknown_name(world):
    text = "I absolutely cannot sit next to Zorblax the Unseen because of a rivalry between siblings."
    with pytest.raises(UtteranceParseError):
        parse_utterance(text, world, world.residents[0].id)


def test_relation_pref_mentions_a_real_relative(world):
    # Relation templates embed a name; it must belong to an actual relative.
    for rel in world.relationships:
        if rel.kind == "spouse":
            owner = rel.a
            break
    pref = make_preference(owner, "adjacent_to_spouse", 3)
    text = render_utterance(pref, world, random.Random(1))
    spouse = world.resident(rel.b)
    assert spouse.name in text or any(
        world.resident(o.id).name in text
        for o in world.residents
        if "spouse" in relation_between(world, owner, o.id)
    )
