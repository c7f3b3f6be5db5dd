"""Labeled Petri nets: markings, enabledness and firing semantics.

A net is immutable once constructed and safe to share between threads.
Markings are immutable multisets of tokens over place ids, kept in a
canonical sorted form so they can serve as dictionary keys.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .errors import FiringNotEnabled, ValidationError

# Activity labels are plain non-empty strings; equality is exact and
# case-sensitive.
ActivityLabel = str


@dataclass(frozen=True)
class Marking:
    """Multiset of tokens over place ids, in canonical form.

    Zero-count entries are never stored, and entries are sorted by place
    id, so two markings are equal iff they contain the same tokens.
    """

    entries: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        for place, count in self.entries:
            if count <= 0:
                raise ValueError(f"non-positive token count {count} for place {place!r}")
        ids = [p for p, _ in self.entries]
        if ids != sorted(ids) or len(set(ids)) != len(ids):
            raise ValueError("marking entries must be sorted and unique; use Marking.of()")

    @classmethod
    def of(cls, tokens: Mapping[str, int] | Iterable[str]) -> "Marking":
        """Build a marking from a place->count mapping or an iterable of places."""
        if isinstance(tokens, Mapping):
            counts = dict(tokens)
        else:
            counts = {}
            for place in tokens:
                counts[place] = counts.get(place, 0) + 1
        return cls(tuple(sorted((p, c) for p, c in counts.items() if c != 0)))

    @classmethod
    def _from_canonical(cls, entries: tuple[tuple[str, int], ...]) -> "Marking":
        # fast path for firing: entries are already sorted, unique, positive
        marking = object.__new__(cls)
        object.__setattr__(marking, "entries", entries)
        return marking

    @classmethod
    def empty(cls) -> "Marking":
        return cls(())

    def count(self, place: str) -> int:
        for p, c in self.entries:
            if p == place:
                return c
        return 0

    def places(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.entries)

    def total_tokens(self) -> int:
        return sum(c for _, c in self.entries)

    def as_dict(self) -> dict[str, int]:
        return dict(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def __str__(self) -> str:
        if not self.entries:
            return "[]"
        parts = [p if c == 1 else f"{p}^{c}" for p, c in self.entries]
        return "[" + ", ".join(parts) + "]"


@dataclass(frozen=True)
class PetriNet:
    """A labeled Petri net with an initial and a final marking.

    ``labels`` maps transition ids to activity labels; transitions absent
    from the map are silent. Arcs are ordinary (weight 1).
    """

    places: frozenset[str]
    transitions: frozenset[str]
    arcs: frozenset[tuple[str, str]]
    labels: Mapping[str, ActivityLabel]
    initial_marking: Marking
    final_marking: Marking
    name: str = ""
    _preset: dict[str, tuple[str, ...]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )
    _postset: dict[str, tuple[str, ...]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )
    _by_label: dict[str, tuple[str, ...]] = field(
        init=False, repr=False, compare=False, default_factory=dict
    )

    def __post_init__(self) -> None:
        self._validate()
        pre: dict[str, list[str]] = {t: [] for t in self.transitions}
        post: dict[str, list[str]] = {t: [] for t in self.transitions}
        for source, target in sorted(self.arcs):
            if source in self.places:
                pre[target].append(source)
            else:
                post[source].append(target)
        object.__setattr__(self, "_preset", {t: tuple(v) for t, v in pre.items()})
        object.__setattr__(self, "_postset", {t: tuple(v) for t, v in post.items()})
        by_label: dict[str, list[str]] = {}
        for t in sorted(self.transitions):
            label = self.labels.get(t)
            if label is not None:
                by_label.setdefault(label, []).append(t)
        object.__setattr__(self, "_by_label", {a: tuple(v) for a, v in by_label.items()})

    def _validate(self) -> None:
        overlap = self.places & self.transitions
        if overlap:
            raise ValidationError(f"ids used as both place and transition: {sorted(overlap)}")
        for source, target in self.arcs:
            if source in self.places and target in self.transitions:
                continue
            if source in self.transitions and target in self.places:
                continue
            raise ValidationError(f"arc ({source!r}, {target!r}) does not connect a place and a transition")
        for t, label in self.labels.items():
            if t not in self.transitions:
                raise ValidationError(f"label for unknown transition {t!r}")
            if not label:
                raise ValidationError(f"empty label for transition {t!r}; omit silent transitions instead")
        for which, marking in (("initial", self.initial_marking), ("final", self.final_marking)):
            unknown = [p for p, _ in marking.entries if p not in self.places]
            if unknown:
                raise ValidationError(f"{which} marking references unknown places {unknown}")

    @classmethod
    def build(
        cls,
        places: Iterable[str],
        transitions: Mapping[str, ActivityLabel | None],
        arcs: Iterable[tuple[str, str]],
        initial: Mapping[str, int] | Iterable[str],
        final: Mapping[str, int] | Iterable[str],
        name: str = "",
    ) -> "PetriNet":
        """Convenience constructor; ``transitions`` maps id -> label (None = silent)."""
        labels = {t: lab for t, lab in transitions.items() if lab is not None}
        return cls(
            places=frozenset(places),
            transitions=frozenset(transitions),
            arcs=frozenset(arcs),
            labels=labels,
            initial_marking=Marking.of(initial),
            final_marking=Marking.of(final),
            name=name,
        )

    # -- semantics ---------------------------------------------------------

    def label(self, transition: str) -> ActivityLabel | None:
        return self.labels.get(transition)

    def is_silent(self, transition: str) -> bool:
        return transition not in self.labels

    def preset(self, transition: str) -> tuple[str, ...]:
        return self._preset[transition]

    def postset(self, transition: str) -> tuple[str, ...]:
        return self._postset[transition]

    def transitions_labeled(self, activity: ActivityLabel) -> tuple[str, ...]:
        """All transitions carrying this label, in id order."""
        return self._by_label.get(activity, ())

    def is_enabled(self, marking: Marking, transition: str) -> bool:
        entries = marking.entries
        for p in self._preset[transition]:
            for place, _ in entries:
                if place == p:
                    break
            else:
                return False
        return True

    def enabled_transitions(self, marking: Marking) -> set[str]:
        """Transitions with at least one token on every input place."""
        return {t for t in self.transitions if self.is_enabled(marking, t)}

    def fire(self, marking: Marking, transition: str) -> Marking:
        """Fire an enabled transition, consuming and producing one token per arc."""
        if not self.is_enabled(marking, transition):
            raise FiringNotEnabled(transition, marking)
        counts = marking.as_dict()
        for p in self._preset[transition]:
            counts[p] -= 1
        for p in self._postset[transition]:
            counts[p] = counts.get(p, 0) + 1
        return Marking._from_canonical(
            tuple(sorted((p, c) for p, c in counts.items() if c != 0))
        )

    def is_final(self, marking: Marking) -> bool:
        return marking == self.final_marking
