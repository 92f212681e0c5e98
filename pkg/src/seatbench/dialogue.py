"""Template-based NPC utterances and the rule-based parser that inverts them.

Each constraint kind has at least three sentence templates. Rendering picks a
template with the supplied rng and fills in the strength adverb and any
parameters; parsing matches the same templates compiled to regular
expressions, so round trips are exact by construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .constraints import (
    CONFLICT_KINDS,
    EMBODIED_KINDS,
    SOCIAL_RELATION_KINDS,
    Conflict,
    Constraint,
    Preference,
    make_preference,
)
from .world import TOPIC_TAGS, World

STRENGTH_ADVERB = {1: "slightly", 2: "quite", 3: "absolutely"}
ADVERB_STRENGTH = {v: k for k, v in STRENGTH_ADVERB.items()}

# Phrase used inside relation templates, keyed by preference kind.
_REL_PHRASE = {
    "adjacent_to_spouse": "spouse",
    "adjacent_to_parent_or_child": "parent or child",
    "adjacent_to_sibling": "sibling",
    "adjacent_to_grandparent_or_grandchild": "grandparent or grandchild",
    "adjacent_to_in_law": "in-law",
    "adjacent_to_friend": "friend",
    "adjacent_to_neighbor": "neighbor",
    "adjacent_to_colleague_or_superior": "colleague or superior",
    "adjacent_to_classmate_or_teacher": "classmate or teacher",
}

_CONFLICT_PHRASE = {
    "spousal_quarrel": "a quarrel with my spouse",
    "parent_child_dispute": "a dispute between parent and child",
    "sibling_rivalry": "a rivalry between siblings",
    "in_law_friction": "friction with my in-laws",
    "grandparent_generation_dispute": "a generational dispute with my grandparent or grandchild",
    "friend_falling_out": "a falling-out between friends",
    "neighbor_property_dispute": "a property dispute between neighbors",
    "colleague_rivalry": "a rivalry between colleagues",
    "superior_subordinate_grievance": "a grievance between superior and subordinate",
    "teacher_student_tension": "tension between teacher and student",
    "classmate_rivalry": "a rivalry between classmates",
    "workplace_income_dispute": "a workplace dispute over income",
}


def default_template_pack() -> dict[str, list[str]]:
    """Kind -> list of sentence templates. Slots: {adv}, {name}, {topic}."""
    pack: dict[str, list[str]] = {
        "near_window": [
            "I {adv} want a seat close to a window.",
            "I would {adv} like to sit right by a window.",
            "Being near a window is {adv} important to me.",
        ],
        "away_from_window": [
            "I {adv} want to stay far away from any window.",
            "Please keep me {adv} clear of the windows.",
            "Sitting away from the windows matters {adv} to me.",
        ],
        "tv_in_view": [
            "I {adv} must be able to see the television from my seat.",
            "Having the television in my field of view is {adv} important to me.",
            "I {adv} need a clear view of the television.",
        ],
        "near_air_conditioner": [
            "I {adv} want to sit close to an air conditioner.",
            "A seat near the air conditioner would {adv} suit me.",
            "Being close to an air conditioner is {adv} important to me.",
        ],
        "away_from_air_conditioner": [
            "I {adv} want to keep away from the air conditioner.",
            "Please seat me {adv} far from any air conditioner.",
            "Staying away from the air conditioner matters {adv} to me.",
        ],
        "near_kitchen": [
            "I {adv} want to sit close to the kitchen.",
            "A seat near the kitchen would {adv} please me.",
            "Being close to the kitchen is {adv} important to me.",
        ],
        "away_from_kitchen": [
            "I {adv} want to stay far from the kitchen.",
            "Please keep me {adv} away from the kitchen area.",
            "Sitting far from the kitchen matters {adv} to me.",
        ],
        "near_exit": [
            "I {adv} want a seat close to an exit.",
            "Sitting near an exit would {adv} reassure me.",
            "Being close to an exit is {adv} important to me.",
        ],
        "tableware_chopsticks": [
            "I {adv} need a place set with chopsticks.",
            "Eating with chopsticks is {adv} important to me.",
            "Please make sure my seat {adv} has chopsticks.",
        ],
        "tableware_cutlery": [
            "I {adv} need a place set with cutlery.",
            "Eating with cutlery is {adv} important to me.",
            "Please make sure my seat {adv} has cutlery.",
        ],
        "dominant_hand_clearance": [
            "I {adv} need elbow room on my dominant-hand side.",
            "Having no one seated on my dominant-hand side is {adv} important to me.",
            "Please leave my dominant-hand side {adv} free of neighbors.",
        ],
        "adjacent_to_peer_age_band": [
            "I {adv} want to sit beside someone around my own age.",
            "Sitting next to a peer of my age is {adv} important to me.",
            "Please seat me {adv} close to people of my generation.",
        ],
        "adjacent_to_same_gender": [
            "I {adv} want to sit beside someone of my own gender.",
            "Sitting next to a person of my gender is {adv} important to me.",
            "Please seat me {adv} beside someone who shares my gender.",
        ],
        "adjacent_to_same_job_sector": [
            "I {adv} want to sit beside someone who works in my sector.",
            "Sitting next to a person from my line of work is {adv} important to me.",
            "Please seat me {adv} beside someone from my own industry.",
        ],
        "adjacent_to_same_income_level": [
            "I {adv} want to sit beside someone of my income level.",
            "Sitting next to a person of similar means is {adv} important to me.",
            "Please seat me {adv} beside someone with an income like mine.",
        ],
        "adjacent_to_highly_educated": [
            "I {adv} want to sit beside someone highly educated.",
            "Sitting next to a highly educated person is {adv} important to me.",
            "Please seat me {adv} beside one of the well-schooled.",
        ],
    }
    for kind, phrase in _REL_PHRASE.items():
        pack[kind] = [
            "I {adv} want to sit beside my " + phrase + ", {name}.",
            "Sitting next to my " + phrase + " {name} is {adv} important to me.",
            "Please seat me {adv} close to {name}, my " + phrase + ".",
        ]
    for topic in TOPIC_TAGS:
        pack[f"shared_interest_{topic}"] = [
            "I {adv} want a neighbor I can talk about " + topic + " with.",
            "Discussing " + topic + " with the person beside me is {adv} important to me.",
            "Please seat me {adv} next to someone who enjoys " + topic + ".",
        ]
    for kind, phrase in _CONFLICT_PHRASE.items():
        pack[kind] = [
            "I {adv} cannot sit next to {name} because of " + phrase + ".",
            "Keep me away from {name}; there is {adv} no getting past " + phrase + ".",
            "Because of " + phrase + ", I {adv} refuse to be seated beside {name}.",
        ]
    return pack


TEMPLATE_PACK = default_template_pack()

_ADV_GROUP = "(?P<adv>" + "|".join(ADVERB_STRENGTH) + ")"
_NAME_GROUP = r"(?P<name>[A-Za-z][A-Za-z' -]*?)"
_TOPIC_GROUP = "(?P<topic>" + "|".join(TOPIC_TAGS) + ")"


def _compile(template: str) -> re.Pattern:
    pattern = re.escape(template)
    pattern = pattern.replace(re.escape("{adv}"), _ADV_GROUP)
    pattern = pattern.replace(re.escape("{name}"), _NAME_GROUP)
    pattern = pattern.replace(re.escape("{topic}"), _TOPIC_GROUP)
    return re.compile("^" + pattern + "$")


_COMPILED: list[tuple[str, str, re.Pattern]] = [
    (kind, template, _compile(template))
    for kind, templates in TEMPLATE_PACK.items()
    for template in templates
]


class UtteranceParseError(Exception):
    def __init__(self, message: str, matched_prefix: str = ""):
        super().__init__(message)
        self.matched_prefix = matched_prefix


def _related_name(w: World, owner: str, kind: str) -> str:
    from .constraints import RELATION_PREF_MATCHES
    from .world import relation_between

    wanted = RELATION_PREF_MATCHES[kind]
    for other in w.residents:
        if other.id == owner:
            continue
        if relation_between(w, owner, other.id) & wanted:
            return other.name
    return "someone dear"


def render_utterance(constraint: Constraint, w: World, rng) -> str:
    """One first-person English sentence for a preference or conflict."""
    kind = constraint.kind
    templates = TEMPLATE_PACK[kind]
    template = templates[rng.randrange(len(templates))]
    adv = STRENGTH_ADVERB[constraint.strength]
    if isinstance(constraint, Conflict):
        return template.format(adv=adv, name=w.resident(constraint.b).name)
    if kind in SOCIAL_RELATION_KINDS:
        return template.format(adv=adv, name=_related_name(w, constraint.owner, kind))
    return template.format(adv=adv)


def _longest_template_prefix(text: str) -> str:
    """Longest prefix of text consumable by any template's literal pieces."""
    best = 0
    for _, template, _pattern in _COMPILED:
        pieces = re.split(r"\{adv\}|\{name\}|\{topic\}", template)
        pos = 0
        for i, piece in enumerate(pieces):
            if not text.startswith(piece, pos) and i == 0:
                break
            idx = text.find(piece, pos) if i > 0 else 0
            if idx < 0:
                break
            pos = idx + len(piece)
        best = max(best, pos if pos > 0 else 0)
    return text[:best]


def parse_utterance(text: str, w: World, speaker: str) -> Constraint:
    """Invert render_utterance: recover kind, parameters, and strength.

    ``speaker`` is the NPC who produced the utterance (utterances are
    first-person, so ownership comes from the dialogue context).
    """
    for kind, _template, pattern in _COMPILED:
        m = pattern.match(text)
        if m is None:
            continue
        strength = ADVERB_STRENGTH[m.group("adv")]
        if kind in CONFLICT_KINDS:
            name = m.group("name")
            other = w.name_index().get(name)
            if other is None:
                raise UtteranceParseError(
                    f"conflict names unknown resident {name!r}", text
                )
            return Conflict(a=speaker, b=other, kind=kind, strength=strength)
        return make_preference(speaker, kind, strength)
    raise UtteranceParseError(
        "utterance matches no known template", _longest_template_prefix(text)
    )
