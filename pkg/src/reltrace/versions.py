"""Parse, order, and classify backend version triples from header text.

A version is a ``major.minor.maintenance`` triple with a total
lexicographic order.  Extraction scans raw header text with a configurable
regular expression; the default expression targets ``PHP/x.y.z`` tokens
with single-digit major and minor components.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import lru_cache

from .kernels import scan_default

DEFAULT_PATTERN = r"PHP/[0-9]{1}\.[0-9]{1}\.[0-9]{1,}"

_TRIPLE_RE = re.compile(r"([0-9]+)\.([0-9]+)\.([0-9]+)")
_CANONICAL_RE = re.compile(r"([0-9]+)\.([0-9]+)\.([0-9]+)\Z")


class PatternError(ValueError):
    """An extraction pattern that cannot be used; raised at configuration time."""


class DowngradeKind(enum.Enum):
    """How one version pair steps backwards, if at all.

    Exactly one kind applies to every ordered pair: the major component
    dropped, the minor dropped within the same major, the maintenance
    dropped within the same major.minor, or nothing dropped (upgrades and
    identical versions both map to NONE).
    """

    MAJOR = "major"
    MINOR = "minor"
    MAINTENANCE = "maintenance"
    NONE = "none"


@dataclass(frozen=True, order=True)
class Version:
    """A major.minor.maintenance triple, ordered lexicographically.

    ``raw`` keeps the exact matched substring for provenance and is
    excluded from equality, ordering, and hashing.
    """

    major: int
    minor: int
    maintenance: int
    raw: str = field(default="", compare=False)

    def __str__(self) -> str:
        return f"{self.major}.{self.minor}.{self.maintenance}"

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.major, self.minor, self.maintenance)

    @classmethod
    def from_string(cls, text: str) -> "Version":
        """Parse a canonical ``major.minor.maintenance`` string."""
        m = _CANONICAL_RE.fullmatch(text.strip())
        if m is None:
            raise ValueError(f"not a canonical version string: {text!r}")
        return cls(int(m[1]), int(m[2]), int(m[3]), raw=text.strip())


@dataclass(frozen=True)
class VersionPattern:
    """A compiled extraction pattern.

    When the expression defines at least three capturing groups, the first
    three are taken as the major, minor, and maintenance components.
    Otherwise the components are read from the first ``a.b.c`` triple
    inside the matched text.
    """

    source: str
    case_sensitive: bool
    regex: re.Pattern = field(compare=False)
    grouped: bool = field(compare=False)

    def search(self, text: str) -> Version | None:
        m = self.regex.search(text)
        if m is None:
            return None
        if self.grouped:
            parts = m.groups()[:3]
        else:
            inner = _TRIPLE_RE.search(m.group(0))
            if inner is None:
                return None
            parts = inner.groups()
        try:
            major, minor, maintenance = (int(p) for p in parts)
        except (TypeError, ValueError):
            return None
        return Version(major, minor, maintenance, raw=m.group(0))


@lru_cache(maxsize=64)
def compile_pattern(pattern: str = DEFAULT_PATTERN,
                    case_sensitive: bool = True) -> VersionPattern:
    """Compile an extraction pattern, raising PatternError if unusable."""
    flags = 0 if case_sensitive else re.IGNORECASE
    try:
        regex = re.compile(pattern, flags)
    except re.error as exc:
        raise PatternError(f"invalid extraction pattern {pattern!r}: {exc}") from None
    return VersionPattern(pattern, case_sensitive, regex, regex.groups >= 3)


def extract_version(header_text: str,
                    pattern: str | VersionPattern = DEFAULT_PATTERN,
                    case_sensitive: bool = True) -> Version | None:
    """Extract the first version occurrence from *header_text*.

    The first match wins regardless of any later matches.  Returns None
    when the pattern does not occur.
    """
    if isinstance(pattern, str):
        if pattern == DEFAULT_PATTERN and case_sensitive:
            hit = scan_default(header_text)
            if hit is None:
                return None
            major, minor, maintenance, start, end = hit
            return Version(major, minor, maintenance, raw=header_text[start:end])
        pattern = compile_pattern(pattern, case_sensitive)
    return pattern.search(header_text)


def compare(a: Version, b: Version) -> int:
    """Total order on (major, minor, maintenance): -1, 0, or 1."""
    return (a.key > b.key) - (a.key < b.key)


def classify_transition(before: Version, after: Version) -> DowngradeKind:
    """Classify the step from *before* to *after*.

    A non-NONE kind is returned exactly when *after* sorts strictly below
    *before*; upgrades and identical versions are NONE.
    """
    if after.major < before.major:
        return DowngradeKind.MAJOR
    if after.major == before.major:
        if after.minor < before.minor:
            return DowngradeKind.MINOR
        if after.minor == before.minor and after.maintenance < before.maintenance:
            return DowngradeKind.MAINTENANCE
    return DowngradeKind.NONE


def is_downgrade(kind: DowngradeKind) -> bool:
    return kind is not DowngradeKind.NONE
