"""Domain types for ACOS quadruple extraction and dataset ingestion.

An ACOS example is a review sentence annotated with an unordered set of
(aspect term, aspect category, opinion term, sentiment polarity) quadruples.
Aspect and opinion terms may be *implicit*: they carry no supporting span in
the sentence. This module defines the immutable domain types, the TSV dataset
loader/serializer, and the derivation of example-level characteristic labels
(sentiment / aspect type / opinion type) used by the contrastive objective.

Dataset file layout (one example per line, UTF-8, LF or CRLF):

    <sentence text> TAB <quad> [TAB <quad> ...]

where each quad is four space-separated fields:

    <aspect start,end> <CATEGORY> <sentiment code> <opinion start,end>

Spans index into the whitespace-tokenized sentence, end-exclusive; the
sentinel "-1,-1" marks an implicit term; sentiment codes are
0=negative, 1=neutral, 2=positive.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum, IntEnum
from pathlib import Path
from typing import Iterable, Sequence

__all__ = [
    "IMPLICIT",
    "SentimentPolarity",
    "Span",
    "Quadruple",
    "QuadType",
    "Example",
    "CharacteristicLabels",
    "DatasetError",
    "load_dataset",
    "parse_dataset_text",
    "serialize_dataset",
    "quad_type",
    "characteristic_labels",
]

# Reserved tokens of the linearized output grammar. Terms containing them
# cannot be serialized unambiguously, so they are rejected at load time.
FIELD_SEPARATOR = "|"
QUAD_SEPARATOR = "[SSEP]"


class _Implicit:
    """Distinguished marker for an implicit aspect/opinion (no text span)."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "IMPLICIT"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, _Implicit)

    def __hash__(self) -> int:
        return hash(_Implicit)


IMPLICIT = _Implicit()


class SentimentPolarity(IntEnum):
    """Sentiment polarity with the dataset's integer codes as values.

    The integer order (negative < neutral < positive) doubles as the
    canonical tie-breaking order.
    """

    NEGATIVE = 0
    NEUTRAL = 1
    POSITIVE = 2

    @property
    def word(self) -> str:
        return self.name.lower()

    @classmethod
    def from_code(cls, code: int) -> "SentimentPolarity":
        try:
            return cls(code)
        except ValueError:
            raise ValueError(f"unknown sentiment code {code!r} (expected 0, 1 or 2)") from None

    @classmethod
    def from_word(cls, word: str) -> "SentimentPolarity":
        try:
            return cls[word.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown sentiment word {word!r}") from None


@dataclass(frozen=True)
class Span:
    """Token span [start, end) into the owning sentence's token list."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if not (0 <= self.start < self.end):
            raise ValueError(f"invalid span ({self.start},{self.end}): need 0 <= start < end")


class QuadType(Enum):
    """Quadruple class by explicit/implicit aspect (first) and opinion (second)."""

    EAEO = "EAEO"
    IAEO = "IAEO"
    EAIO = "EAIO"
    IAIO = "IAIO"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Quadruple:
    """One (aspect, category, opinion, sentiment) annotation.

    ``aspect_span``/``opinion_span`` are either a :class:`Span` or the
    ``IMPLICIT`` marker; the matching ``*_text`` is the whitespace-joined
    span tokens, and empty exactly when the term is implicit.
    """

    aspect_span: Span | _Implicit
    aspect_text: str
    category: str
    opinion_span: Span | _Implicit
    opinion_text: str
    sentiment: SentimentPolarity

    def __post_init__(self) -> None:
        if not self.category:
            raise ValueError("category must be non-empty")
        if isinstance(self.aspect_span, _Implicit) != (self.aspect_text == ""):
            raise ValueError("aspect text must be empty iff the aspect is implicit")
        if isinstance(self.opinion_span, _Implicit) != (self.opinion_text == ""):
            raise ValueError("opinion text must be empty iff the opinion is implicit")

    @property
    def aspect_explicit(self) -> bool:
        return isinstance(self.aspect_span, Span)

    @property
    def opinion_explicit(self) -> bool:
        return isinstance(self.opinion_span, Span)

    def match_key(self) -> tuple:
        """Surface-level identity used for exact-match evaluation.

        Spans are deliberately excluded: parsed predictions carry no token
        indices, so gold and predicted quads compare on resolved text.
        """
        aspect = self.aspect_text if self.aspect_explicit else IMPLICIT
        opinion = self.opinion_text if self.opinion_explicit else IMPLICIT
        return (aspect, self.category, opinion, self.sentiment)


def quad_type(q: Quadruple) -> QuadType:
    """Classify a quadruple by aspect/opinion explicitness."""
    if q.aspect_explicit:
        return QuadType.EAEO if q.opinion_explicit else QuadType.EAIO
    return QuadType.IAEO if q.opinion_explicit else QuadType.IAIO


@dataclass(frozen=True)
class Example:
    """A sentence with its (duplicate-free) quadruple set.

    ``quads`` is stored in file order but is semantically an unordered set.
    """

    id: str
    text: str
    tokens: tuple[str, ...]
    quads: tuple[Quadruple, ...]

    def __post_init__(self) -> None:
        seen = set()
        for q in self.quads:
            key = (q.aspect_span, q.category, q.opinion_span, q.sentiment)
            if key in seen:
                raise ValueError(f"duplicate quadruple in example {self.id!r}")
            seen.add(key)
            for span, text, what in (
                (q.aspect_span, q.aspect_text, "aspect"),
                (q.opinion_span, q.opinion_text, "opinion"),
            ):
                if isinstance(span, Span):
                    if span.end > len(self.tokens):
                        raise ValueError(
                            f"{what} span ({span.start},{span.end}) out of bounds for "
                            f"{len(self.tokens)} tokens in example {self.id!r}"
                        )
                    resolved = " ".join(self.tokens[span.start : span.end])
                    if text != resolved:
                        raise ValueError(
                            f"{what} text {text!r} does not match span tokens {resolved!r} "
                            f"in example {self.id!r}"
                        )


@dataclass(frozen=True)
class CharacteristicLabels:
    """Example-level labels for the three trained characteristics.

    sentiment: shared polarity word if all quads agree, else "mixed".
    aspect/opinion: "all-explicit" / "all-implicit", or "mixed" when the
    example contains both explicit and implicit instances of that element.
    """

    sentiment: str
    aspect: str
    opinion: str

    SENTIMENT_LABELS = ("positive", "negative", "neutral", "mixed")
    SPAN_LABELS = ("all-explicit", "all-implicit", "mixed")


def characteristic_labels(x: Example) -> CharacteristicLabels:
    """Derive the per-example characteristic labels from its quad set."""
    if not x.quads:
        raise ValueError(f"example {x.id!r} has no quadruples")

    polarities = {q.sentiment for q in x.quads}
    sentiment = polarities.pop().word if len(polarities) == 1 else "mixed"

    def span_label(flags: set[bool]) -> str:
        if flags == {True}:
            return "all-explicit"
        if flags == {False}:
            return "all-implicit"
        return "mixed"

    aspect = span_label({q.aspect_explicit for q in x.quads})
    opinion = span_label({q.opinion_explicit for q in x.quads})
    return CharacteristicLabels(sentiment=sentiment, aspect=aspect, opinion=opinion)


class DatasetError(ValueError):
    """Raised for malformed dataset files; carries the offending line number."""

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif path is not None:
            where += " "
        super().__init__(where + message)


def _parse_span(field: str) -> Span | _Implicit:
    parts = field.split(",")
    if len(parts) != 2:
        raise ValueError(f"malformed span {field!r}")
    try:
        start, end = int(parts[0]), int(parts[1])
    except ValueError:
        raise ValueError(f"malformed span {field!r}") from None
    if (start, end) == (-1, -1):
        return IMPLICIT
    if start < 0 or end < 0:
        raise ValueError(f"malformed span {field!r}: negative index (implicit is -1,-1)")
    if start >= end:
        raise ValueError(f"span ({start},{end}) out of bounds: need start < end")
    return Span(start, end)


def _check_term(term: str) -> None:
    for reserved in (FIELD_SEPARATOR, QUAD_SEPARATOR):
        if reserved in term:
            raise ValueError(f"term {term!r} contains reserved separator {reserved!r}")


def _parse_quad_field(field: str, tokens: Sequence[str]) -> Quadruple:
    parts = field.split()
    if len(parts) != 4:
        raise ValueError(f"malformed quadruple field {field!r} (expected 4 space-separated parts)")
    aspect_raw, category, code_raw, opinion_raw = parts
    try:
        code = int(code_raw)
    except ValueError:
        raise ValueError(f"unknown sentiment code {code_raw!r} (expected 0, 1 or 2)") from None
    sentiment = SentimentPolarity.from_code(code)

    def resolve(span_field: str, what: str) -> tuple[Span | _Implicit, str]:
        span = _parse_span(span_field)
        if isinstance(span, _Implicit):
            return span, ""
        if span.end > len(tokens):
            raise ValueError(
                f"{what} span ({span.start},{span.end}) out of bounds for {len(tokens)} tokens"
            )
        text = " ".join(tokens[span.start : span.end])
        _check_term(text)
        return span, text

    aspect_span, aspect_text = resolve(aspect_raw, "aspect")
    opinion_span, opinion_text = resolve(opinion_raw, "opinion")
    return Quadruple(
        aspect_span=aspect_span,
        aspect_text=aspect_text,
        category=category,
        opinion_span=opinion_span,
        opinion_text=opinion_text,
        sentiment=sentiment,
    )


def parse_dataset_text(
    text: str, *, id_prefix: str = "ex", path: str | None = None
) -> list[Example]:
    """Parse dataset TSV content into examples. See module docstring for layout."""
    examples: list[Example] = []
    duplicates = 0
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.rstrip("\r")
        if not line.strip():
            raise DatasetError("blank line", path=path, line=line_no)
        fields = line.split("\t")
        sentence = fields[0]
        quad_fields = [f for f in fields[1:] if f.strip()]
        if not quad_fields:
            raise DatasetError("no quadruples", path=path, line=line_no)
        tokens = tuple(sentence.split())
        quads: list[Quadruple] = []
        seen: set[tuple] = set()
        for field in quad_fields:
            try:
                quad = _parse_quad_field(field, tokens)
            except ValueError as exc:
                raise DatasetError(str(exc), path=path, line=line_no) from None
            key = (quad.aspect_span, quad.category, quad.opinion_span, quad.sentiment)
            if key in seen:
                duplicates += 1
                continue
            seen.add(key)
            quads.append(quad)
        examples.append(
            Example(
                id=f"{id_prefix}-{line_no:04d}",
                text=sentence,
                tokens=tokens,
                quads=tuple(quads),
            )
        )
    if duplicates:
        warnings.warn(
            f"dropped {duplicates} duplicate quadruple(s) while loading {path or 'dataset'}",
            stacklevel=2,
        )
    return examples


def load_dataset(path: str | Path, split: str = "") -> list[Example]:
    """Load a dataset TSV file. ``split`` (train/dev/test) prefixes example ids."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DatasetError(f"no such file: {path}") from None
    prefix = split if split else path.stem
    return parse_dataset_text(text, id_prefix=prefix, path=str(path))


def _format_span(span: Span | _Implicit) -> str:
    if isinstance(span, _Implicit):
        return "-1,-1"
    return f"{span.start},{span.end}"


def serialize_dataset(examples: Iterable[Example]) -> str:
    """Serialize examples back to the TSV layout accepted by the loader."""
    lines = []
    for x in examples:
        quad_fields = [
            f"{_format_span(q.aspect_span)} {q.category} {int(q.sentiment)} "
            f"{_format_span(q.opinion_span)}"
            for q in x.quads
        ]
        lines.append("\t".join([x.text, *quad_fields]))
    return "\n".join(lines) + "\n"
