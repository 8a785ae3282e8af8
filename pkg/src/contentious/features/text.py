"""Lexicon-based sentiment scoring and the two text features.

The scorer is deliberately simple and auditable: tokenize, look tokens up
in a valence lexicon, average the matches.  Any richer scorer can be
swapped in by loading a different lexicon file.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..threads import CommentTree, DataError

_TOKEN_RE = re.compile(r"\w+", re.UNICODE)


@dataclass(frozen=True)
class Lexicon:
    """Token -> valence map with scores in [-1, 1]."""

    entries: dict[str, float]
    name: str = "lexicon"
    case_folding: bool = True

    def __post_init__(self) -> None:
        for token, score in self.entries.items():
            if not token:
                raise DataError(f"lexicon {self.name!r}: empty token")
            if not -1.0 <= score <= 1.0:
                raise DataError(
                    f"lexicon {self.name!r}: score {score} for {token!r} outside [-1, 1]"
                )
        if self.case_folding:
            folded = {t.lower(): s for t, s in self.entries.items()}
            object.__setattr__(self, "entries", folded)


@dataclass(frozen=True)
class TextFeatures:
    comment_emotion: float
    post_emotion: float


# Small built-in valence list so the toolkit works out of the box; real
# runs should load a full lexicon with ``load_lexicon``.
DEMO_LEXICON = Lexicon(
    entries={
        "good": 0.5,
        "great": 0.8,
        "love": 0.9,
        "like": 0.4,
        "right": 0.3,
        "agree": 0.5,
        "best": 0.7,
        "fair": 0.4,
        "win": 0.5,
        "peace": 0.6,
        "bad": -0.5,
        "terrible": -0.8,
        "hate": -0.9,
        "wrong": -0.4,
        "disagree": -0.5,
        "worst": -0.7,
        "unfair": -0.5,
        "lose": -0.4,
        "war": -0.6,
        "stupid": -0.7,
        "liar": -0.8,
        "awful": -0.7,
    },
    name="demo",
)


def load_lexicon(path: str, name: str | None = None, case_folding: bool = True) -> Lexicon:
    """Load a TSV lexicon: ``token<TAB>score`` per line, '#' comments."""
    entries: dict[str, float] = {}
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read lexicon {path}: {exc}") from exc
    with handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 'token<TAB>score'")
            try:
                score = float(parts[1])
            except ValueError as exc:
                raise DataError(f"{path}:{lineno}: bad score {parts[1]!r}") from exc
            entries[parts[0]] = score
    return Lexicon(entries=entries, name=name or path, case_folding=case_folding)


def tokenize(text: str) -> list[str]:
    """Split on Unicode whitespace/punctuation (word characters survive)."""
    return _TOKEN_RE.findall(text)


def score_text(text: str, lexicon: Lexicon) -> float:
    """Mean valence of lexicon-matched tokens; 0.0 when nothing matches."""
    tokens = tokenize(text)
    if lexicon.case_folding:
        tokens = [t.lower() for t in tokens]
    matches = [lexicon.entries[t] for t in tokens if t in lexicon.entries]
    if not matches:
        return 0.0
    return sum(matches) / len(matches)


def text_features(
    tree: CommentTree, lexicon: Lexicon, absolute: bool = False
) -> TextFeatures:
    """Mean comment sentiment and post sentiment.

    ``absolute`` switches from signed scores to absolute magnitudes, for
    callers that want intensity rather than polarity.
    """
    def _score(text: str) -> float:
        s = score_text(text, lexicon)
        return abs(s) if absolute else s

    n = tree.size
    if n == 0:
        s_c = 0.0
    else:
        s_c = sum(_score(c.text) for c in tree.comments.values()) / n
    return TextFeatures(comment_emotion=s_c, post_emotion=_score(tree.post.text))
