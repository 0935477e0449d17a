"""Linearize quadruple sets into generation target strings.

Two target formats are supported:

* ``gen-nat`` -- a natural-language template per quad,
  ``<category description> | the <aspect> is <opinion> | <sentiment>``,
  using human-readable category descriptions and the literal sentiment
  words positive/neutral/negative. Implicit aspects render as ``it``
  (article dropped), implicit opinions as ``null``.
* ``paraphrase`` -- the older baseline template,
  ``<RAW_CATEGORY> is <great|okay|bad> because <aspect> is <opinion>``.

Multi-quad examples are emitted in scan order: ascending by the last token
position of each quad's explicit aspect/opinion spans, quads with neither
span last. Quads are joined with the ``[SSEP]`` separator token.
"""

from __future__ import annotations

import difflib
from enum import Enum
from pathlib import Path

from .core import (
    FIELD_SEPARATOR,
    QUAD_SEPARATOR,
    Example,
    Quadruple,
    SentimentPolarity,
    Span,
)

__all__ = [
    "CategoryMap",
    "CategoryMapError",
    "FormatStyle",
    "naturalize_category",
    "linearize_quad",
    "order_quads",
    "linearize_example",
    "SSEP_JOINER",
]

SSEP_JOINER = f" {QUAD_SEPARATOR} "

PARAPHRASE_SENTIMENT = {
    SentimentPolarity.POSITIVE: "great",
    SentimentPolarity.NEUTRAL: "okay",
    SentimentPolarity.NEGATIVE: "bad",
}

IMPLICIT_ASPECT_WORD = "it"
IMPLICIT_OPINION_WORD = "null"


class FormatStyle(str, Enum):
    GEN_NAT = "gen-nat"
    PARAPHRASE = "paraphrase"


class CategoryMapError(ValueError):
    pass


class CategoryMap:
    """Invertible mapping from raw category labels to natural descriptions.

    Descriptions must be unique (the inverse lookup drives parsing) and must
    not contain the output grammar's separator tokens.
    """

    def __init__(self, entries: dict[str, str]):
        self._by_raw: dict[str, str] = {}
        self._by_description: dict[str, str] = {}
        for raw, description in entries.items():
            raw = raw.strip()
            description = description.strip()
            if not raw or not description:
                raise CategoryMapError(f"empty label or description in entry {raw!r} -> {description!r}")
            for reserved in (FIELD_SEPARATOR, QUAD_SEPARATOR):
                if reserved in description:
                    raise CategoryMapError(
                        f"description {description!r} contains reserved separator {reserved!r}"
                    )
            if raw in self._by_raw:
                raise CategoryMapError(f"duplicate raw label {raw!r}")
            if description in self._by_description:
                raise CategoryMapError(
                    f"duplicate description {description!r} "
                    f"(for {raw!r} and {self._by_description[description]!r})"
                )
            self._by_raw[raw] = description
            self._by_description[description] = raw
        # Longest-first ordering so prefix lookup resolves to the most
        # specific description ("the food quality" before "the food").
        self._descriptions_longest_first = sorted(self._by_description, key=len, reverse=True)

    def __len__(self) -> int:
        return len(self._by_raw)

    def __contains__(self, raw: str) -> bool:
        return raw in self._by_raw

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self._by_raw)

    def natural(self, raw: str) -> str:
        try:
            return self._by_raw[raw]
        except KeyError:
            near = difflib.get_close_matches(raw, self._by_raw, n=1)
            hint = f" (nearest known label: {near[0]!r})" if near else ""
            raise CategoryMapError(f"unknown category label {raw!r}{hint}") from None

    def raw_for_description(self, text: str) -> str | None:
        """Inverse lookup: longest known description that prefixes ``text``.

        Returns None when no description matches. The prefix rule recovers
        categories from decoder output that trails extra tokens.
        """
        text = text.strip()
        if text in self._by_description:
            return self._by_description[text]
        for description in self._descriptions_longest_first:
            if text.startswith(description):
                return self._by_description[description]
        return None

    @classmethod
    def from_text(cls, text: str, *, source: str = "<string>") -> "CategoryMap":
        entries: dict[str, str] = {}
        for line_no, raw_line in enumerate(text.splitlines(), start=1):
            line = raw_line.rstrip("\r")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CategoryMapError(
                    f"{source}:{line_no}: expected 'RAW_LABEL<TAB>description', got {line!r}"
                )
            raw, description = parts[0].strip(), parts[1].strip()
            if raw in entries:
                raise CategoryMapError(f"{source}:{line_no}: duplicate raw label {raw!r}")
            if description in set(entries.values()):
                raise CategoryMapError(f"{source}:{line_no}: duplicate description {description!r}")
            entries[raw] = description
        if not entries:
            raise CategoryMapError(f"{source}: no entries")
        return cls(entries)

    @classmethod
    def from_tsv(cls, path: str | Path) -> "CategoryMap":
        path = Path(path)
        return cls.from_text(path.read_text(encoding="utf-8"), source=str(path))


def naturalize_category(category: str, category_map: CategoryMap) -> str:
    """Map a raw category label to its natural description."""
    return category_map.natural(category)


def _checked_term(text: str, what: str) -> str:
    for reserved in (FIELD_SEPARATOR, QUAD_SEPARATOR):
        if reserved in text:
            raise ValueError(f"{what} term {text!r} contains reserved separator {reserved!r}")
    return text


def linearize_quad(q: Quadruple, style: FormatStyle, category_map: CategoryMap) -> str:
    """Render one quadruple in the requested target format."""
    if style is FormatStyle.GEN_NAT:
        description = naturalize_category(q.category, category_map)
        if q.aspect_explicit:
            aspect_part = f"the {_checked_term(q.aspect_text, 'aspect')}"
        else:
            aspect_part = IMPLICIT_ASPECT_WORD
        opinion = (
            _checked_term(q.opinion_text, "opinion")
            if q.opinion_explicit
            else IMPLICIT_OPINION_WORD
        )
        return f"{description} | {aspect_part} is {opinion} | {q.sentiment.word}"

    if style is FormatStyle.PARAPHRASE:
        if q.category not in category_map:
            # Same unknown-label error path as gen-nat, for symmetric behavior.
            naturalize_category(q.category, category_map)
        aspect = (
            _checked_term(q.aspect_text, "aspect") if q.aspect_explicit else IMPLICIT_ASPECT_WORD
        )
        opinion = (
            _checked_term(q.opinion_text, "opinion")
            if q.opinion_explicit
            else IMPLICIT_OPINION_WORD
        )
        return f"{q.category} is {PARAPHRASE_SENTIMENT[q.sentiment]} because {aspect} is {opinion}"

    raise ValueError(f"unknown format style {style!r}")


def _scan_key(q: Quadruple) -> tuple:
    """Scan-order sort key.

    Primary key: last token position over the quad's explicit spans; quads
    with neither span explicit sort after all others, ordered by category
    then sentiment. Remaining components make the key total so the order is
    independent of input permutation.
    """

    def coords(span) -> tuple[int, int]:
        return (span.start, span.end) if isinstance(span, Span) else (-1, -1)

    a_start, a_end = coords(q.aspect_span)
    o_start, o_end = coords(q.opinion_span)
    explicit_ends = [e for e in (a_end, o_end) if e >= 0]
    if explicit_ends:
        return (0, max(explicit_ends), a_start, o_start, a_end, o_end, q.category, int(q.sentiment))
    return (1, 0, -1, -1, -1, -1, q.category, int(q.sentiment))


def order_quads(x: Example) -> list[Quadruple]:
    """Order an example's quads for generation (scan order, implicit-only last)."""
    return sorted(x.quads, key=_scan_key)


def linearize_example(x: Example, style: FormatStyle, category_map: CategoryMap) -> str:
    """Linearize an example's full quad set into one target string."""
    if not x.quads:
        raise ValueError(f"example {x.id!r} has no quadruples")
    return SSEP_JOINER.join(linearize_quad(q, style, category_map) for q in order_quads(x))
