"""Canonical relationship dimensions.

Ten dimensions describe the quality of a social tie. Seven of them carry
crowd-elicited word lists and can therefore be matched against message text;
the remaining three (similarity, identity, knowledge) have no word lists and
are excluded from text labeling.
"""

DIMENSIONS: tuple[str, ...] = (
    "similarity",
    "social_support",
    "trust",
    "power",
    "knowledge",
    "identity",
    "respect",
    "romance",
    "fun",
    "conflict",
)

# Dimensions that can carry a matching lexicon, in canonical tie-break order.
LEXICON_BEARING: tuple[str, ...] = (
    "social_support",
    "trust",
    "power",
    "respect",
    "romance",
    "fun",
    "conflict",
)

LEXICON_LESS: tuple[str, ...] = ("similarity", "identity", "knowledge")

# Sentinel for edges whose message bag matches no lexicon entry.
UNTYPED = "untyped"

# Short plain-language prompts used by the annotation service and UI.
DIMENSION_PROMPTS: dict[str, str] = {
    "similarity": "You two are alike: similar age, background, work, or situation in life.",
    "social_support": "This person gives you help, comfort, or encouragement when you need it.",
    "trust": "You can rely on this person and would confide in them.",
    "power": "One of you has authority, resources, or influence over the other.",
    "knowledge": "You exchange information, advice, or expertise with this person.",
    "identity": "You share a group, community, or background that matters to who you are.",
    "respect": "You admire this person or look up to them.",
    "romance": "You are romantically or intimately involved with this person.",
    "fun": "You joke around and have a good time together.",
    "conflict": "There is friction, arguments, or hostility between you.",
}

assert set(DIMENSION_PROMPTS) == set(DIMENSIONS)
assert set(LEXICON_BEARING) | set(LEXICON_LESS) == set(DIMENSIONS)
