"""Disjointness, disjoint unions, family transformers and the example corpus."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from typing import Sequence

from .core import Layout, StoneSpaceError, rotate
from .family import (
    Family,
    LassoComponent,
    _same_layout,
    embed_track,
    family_union,
    occupied_positions,
    single_track,
    track_positions,
)


class DisjointnessError(StoneSpaceError):
    def __init__(self, message: str, position: int, pair: tuple[int, int] = (0, 1)):
        super().__init__(message)
        self.position = position
        self.pair = pair


def _outside(layout: Layout, sigma: Sequence[str | int]):
    keep = layout.tracks(sigma)
    return track_positions(layout, [t for t in range(layout.k) if t not in keep])


def disjointness_witness(F1: Family, F2: Family, sigma: Sequence[str | int] = ()) -> int | None:
    """Least position outside ``sigma`` that both families use, if any."""
    layout = _same_layout([F1, F2])
    shared = occupied_positions(F1) & occupied_positions(F2) & _outside(layout, sigma)
    return shared.first()


def disjointness_check(F1: Family, F2: Family, sigma: Sequence[str | int] = ()) -> bool:
    return disjointness_witness(F1, F2, sigma) is None


def _first_overlap(Fs: Sequence[Family], sigma) -> tuple[int, int, int] | None:
    if not Fs:
        return None
    layout = _same_layout(list(Fs))
    outside = _outside(layout, sigma)
    occ = [occupied_positions(F) & outside for F in Fs]
    for i in range(len(Fs)):
        for j in range(i + 1, len(Fs)):
            pos = (occ[i] & occ[j]).first()
            if pos is not None:
                return i, j, pos
    return None


def pairwise_disjoint(Fs: Sequence[Family], sigma: Sequence[str | int] = ()) -> bool:
    return _first_overlap(Fs, sigma) is None


def require_pairwise_disjoint(Fs: Sequence[Family], sigma: Sequence[str | int] = ()) -> None:
    hit = _first_overlap(Fs, sigma)
    if hit is not None:
        i, j, pos = hit
        raise DisjointnessError(f"families {i} and {j} both use position {pos}", pos, (i, j))


def disjoint_e_union(Fs: Sequence[Family], sigma: Sequence[str | int] = ()) -> Family:
    require_pairwise_disjoint(Fs, sigma)
    union = family_union(list(Fs))
    return Family(union.layout, union.components, frozenset(union.layout.tracks(sigma)))


def _require_free_track(F: Family, track: str | int) -> int:
    t = F.layout.track_index(track)
    if not (occupied_positions(F) & track_positions(F.layout, [t])).is_empty():
        raise StoneSpaceError(f"track {F.layout.track_names[t]} is used by the family")
    return t


def discretize(F: Family, marker_track: str | int) -> Family:
    """Tag every member with a single 1 on ``marker_track``.

    The marker goes at the first marker-track position at or after the end
    of the member's canonical stem.  Only finitely many members share a
    marker position, so every tagged member is isolated, while the untagged
    limits are pushed into the all-zero marker track.
    """
    t = _require_free_track(F, marker_track)
    k = F.layout.k
    comps = []
    for r, stems in F.canonical.items():
        for rho in range(k):
            gap = (t - rho) % k
            infix = (r * (gap // len(r) + 1))[:gap] + "1"
            comps.append(LassoComponent.make(stems.length_class(k, rho).concat_word(infix), rotate(r, (gap + 1) % len(r))))
    return Family.of(F.layout, comps)


def dense_family(layout: Layout, track: str | int) -> Family:
    """All finitely supported points living on one track; its closure is perfect."""
    return single_track("(0+1)*", "0", layout, track)


def free_tracks(F: Family) -> list[int]:
    occ = occupied_positions(F)
    return [t for t in range(F.layout.k) if (occ & track_positions(F.layout, [t])).is_empty()]


def adjoin_dense(F: Family, spare_track: str | int | None = None) -> Family:
    if spare_track is None:
        spare = free_tracks(F)
        if not spare:
            raise StoneSpaceError("no unoccupied track to host a dense family")
        spare_track = spare[0]
    t = _require_free_track(F, spare_track)
    return family_union([F, dense_family(F.layout, t)])


# -- corpus -------------------------------------------------------------------


@dataclass
class CorpusEntry:
    name: str
    source: str

    @cached_property
    def workspace(self):
        from .dsl import parse_spec

        return parse_spec(self.source, filename=f"{self.name}.tsf")

    @property
    def families(self) -> dict[str, Family]:
        return self.workspace.families

    def run(self):
        """Evaluate every ``check`` of the entry; returns the list of results."""
        from .dsl import run_checks

        return run_checks(self.workspace)


def corpus() -> list[CorpusEntry]:
    root = resources.files("stonespace") / "corpus"
    entries = [
        CorpusEntry(item.name[: -len(".tsf")], item.read_text(encoding="utf-8"))
        for item in root.iterdir()
        if item.name.endswith(".tsf")
    ]
    return sorted(entries, key=lambda e: e.name)


def corpus_entry(name: str) -> CorpusEntry:
    for entry in corpus():
        if entry.name == name:
            return entry
    raise StoneSpaceError(f"no corpus entry named {name!r}")


__all__ = [
    "CorpusEntry",
    "DisjointnessError",
    "adjoin_dense",
    "corpus",
    "corpus_entry",
    "dense_family",
    "discretize",
    "disjoint_e_union",
    "disjointness_check",
    "disjointness_witness",
    "embed_track",
    "free_tracks",
    "pairwise_disjoint",
    "require_pairwise_disjoint",
]
