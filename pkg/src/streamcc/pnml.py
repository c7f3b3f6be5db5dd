"""PNML import/export for the supported subset of Petri net markup.

Supported: a single ``<net>`` (optionally wrapped in one ``<page>``) with
place, transition and arc elements, ``<initialMarking>`` token counts and
transition ``<name>`` labels. PNML has no standard final-marking element,
so the final marking is taken from (in order of precedence) the
``final_marking`` argument, a pm4py-style ``<finalmarkings>`` annotation
inside the net, or a sidecar JSON file ``{"final_marking": {...}}``.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import IO, Mapping
from xml.etree import ElementTree as ET
from xml.sax.saxutils import escape, quoteattr

from .errors import ParseError, ValidationError
from .petri import Marking, PetriNet

# Transitions whose label matches this pattern are treated as silent;
# PNML in the wild encodes taus inconsistently.
DEFAULT_SILENT_PATTERN = r"(?i)^tau|^τ$"


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _text_of(element: ET.Element, child: str) -> str | None:
    for node in element:
        if _local(node.tag) == child:
            for sub in node:
                if _local(sub.tag) == "text":
                    return (sub.text or "").strip()
            return (node.text or "").strip()
    return None


def _parse_root(source: str | Path | bytes | IO[bytes]) -> ET.Element:
    try:
        if isinstance(source, bytes):
            return ET.fromstring(source)
        if isinstance(source, (str, Path)):
            return ET.parse(source).getroot()
        return ET.parse(source).getroot()
    except ET.ParseError as exc:
        line, column = exc.position
        raise ParseError(f"malformed PNML at line {line}, column {column}: {exc.msg}") from exc


def load_final_marking_sidecar(path: str | Path) -> dict[str, int]:
    """Read ``{"final_marking": {place: count, ...}}`` from a JSON sidecar."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read final-marking sidecar {path}: {exc}") from exc
    try:
        final = payload["final_marking"]
    except (TypeError, KeyError) as exc:
        raise ParseError(f"sidecar {path} has no 'final_marking' key") from exc
    if not isinstance(final, dict):
        raise ParseError(f"sidecar {path}: 'final_marking' must be an object")
    return {str(p): int(c) for p, c in final.items()}


def load_pnml(
    source: str | Path | bytes | IO[bytes],
    *,
    final_marking: Mapping[str, int] | None = None,
    silent_pattern: str = DEFAULT_SILENT_PATTERN,
) -> PetriNet:
    """Parse a PNML document into a :class:`PetriNet`.

    Raises :class:`ParseError` for malformed XML and :class:`ValidationError`
    for dangling arcs, weighted arcs, duplicate ids or markings over
    unknown places.
    """
    root = _parse_root(source)
    nets = [el for el in root.iter() if _local(el.tag) == "net"]
    if _local(root.tag) == "net":
        nets = [root]
    if not nets:
        raise ParseError("document contains no <net> element")
    if len(nets) > 1:
        raise ValidationError("multiple <net> elements are not supported")
    net_el = nets[0]
    pages = [el for el in net_el if _local(el.tag) == "page"]
    if len(pages) > 1:
        raise ValidationError("multiple <page> elements are not supported")
    body = pages[0] if pages else net_el

    silent = re.compile(silent_pattern)
    places: list[str] = []
    transitions: dict[str, str | None] = {}
    arcs: list[tuple[str, str]] = []
    initial: dict[str, int] = {}

    for el in body:
        kind = _local(el.tag)
        if kind == "place":
            pid = el.get("id")
            if not pid:
                raise ValidationError("<place> without id")
            if pid in places or pid in transitions:
                raise ValidationError(f"duplicate id {pid!r}")
            places.append(pid)
            tokens = _text_of(el, "initialMarking")
            if tokens:
                try:
                    count = int(tokens)
                except ValueError as exc:
                    raise ValidationError(f"place {pid!r}: bad initialMarking {tokens!r}") from exc
                if count < 0:
                    raise ValidationError(f"place {pid!r}: negative initialMarking")
                if count:
                    initial[pid] = count
        elif kind == "transition":
            tid = el.get("id")
            if not tid:
                raise ValidationError("<transition> without id")
            if tid in transitions or tid in places:
                raise ValidationError(f"duplicate id {tid!r}")
            label = _text_of(el, "name")
            if not label or silent.search(label):
                transitions[tid] = None
            else:
                transitions[tid] = label
        elif kind == "arc":
            source_id, target_id = el.get("source"), el.get("target")
            if not source_id or not target_id:
                raise ValidationError("<arc> without source/target")
            weight = _text_of(el, "inscription")
            if weight and weight.isdigit() and int(weight) != 1:
                raise ValidationError(
                    f"arc {source_id!r}->{target_id!r} has weight {weight}; only weight-1 arcs are supported"
                )
            if (source_id, target_id) in arcs:
                raise ValidationError(f"duplicate arc {source_id!r}->{target_id!r}")
            arcs.append((source_id, target_id))

    known = set(places) | set(transitions)
    for source_id, target_id in arcs:
        for endpoint in (source_id, target_id):
            if endpoint not in known:
                raise ValidationError(f"arc references unknown node {endpoint!r}")

    final: Mapping[str, int] | None = final_marking
    if final is None:
        final = _embedded_final_marking(net_el)
    if final is None:
        final = {}

    try:
        return PetriNet.build(
            places=places,
            transitions=transitions,
            arcs=arcs,
            initial=initial,
            final=dict(final),
            name=net_el.get("id", ""),
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def _embedded_final_marking(net_el: ET.Element) -> dict[str, int] | None:
    for el in net_el.iter():
        if _local(el.tag) != "finalmarkings":
            continue
        final: dict[str, int] = {}
        for marking_el in el:
            for place_el in marking_el:
                ref = place_el.get("idref") or place_el.get("id")
                if not ref:
                    raise ValidationError("<finalmarkings> place without idref")
                text = "1"
                for sub in place_el:
                    if _local(sub.tag) == "text":
                        text = (sub.text or "1").strip()
                try:
                    count = int(text)
                except ValueError as exc:
                    raise ValidationError(f"finalmarkings place {ref!r}: bad count {text!r}") from exc
                if count:
                    final[ref] = final.get(ref, 0) + count
        return final
    return None


def load_model(
    path: str | Path,
    *,
    final_marking: Mapping[str, int] | None = None,
    silent_pattern: str = DEFAULT_SILENT_PATTERN,
) -> PetriNet:
    """Load a PNML file, discovering a ``<name>.final.json`` sidecar if present.

    Precedence for the final marking: explicit argument, then sidecar
    file, then a ``<finalmarkings>`` annotation inside the document.
    """
    path = Path(path)
    if final_marking is None:
        sidecar = path.with_suffix(".final.json")
        if sidecar.exists():
            final_marking = load_final_marking_sidecar(sidecar)
    return load_pnml(path, final_marking=final_marking, silent_pattern=silent_pattern)


def to_pnml(net: PetriNet) -> str:
    """Serialize a net to PNML, embedding the final marking as an annotation."""
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        "<pnml>",
        f"  <net id={quoteattr(net.name or 'net1')} type=\"http://www.pnml.org/version-2009/grammar/ptnet\">",
        "    <page id=\"page1\">",
    ]
    for pid in sorted(net.places):
        count = net.initial_marking.count(pid)
        if count:
            lines.append(f"      <place id={quoteattr(pid)}>")
            lines.append(f"        <initialMarking><text>{count}</text></initialMarking>")
            lines.append("      </place>")
        else:
            lines.append(f"      <place id={quoteattr(pid)}/>")
    for tid in sorted(net.transitions):
        label = net.label(tid)
        if label is None:
            lines.append(f"      <transition id={quoteattr(tid)}/>")
        else:
            lines.append(f"      <transition id={quoteattr(tid)}>")
            lines.append(f"        <name><text>{escape(label)}</text></name>")
            lines.append("      </transition>")
    for idx, (source, target) in enumerate(sorted(net.arcs), start=1):
        lines.append(
            f"      <arc id=\"a{idx}\" source={quoteattr(source)} target={quoteattr(target)}/>"
        )
    lines.append("    </page>")
    if net.final_marking.entries:
        lines.append("    <finalmarkings>")
        lines.append("      <marking>")
        for place, count in net.final_marking.entries:
            lines.append(f"        <place idref={quoteattr(place)}><text>{count}</text></place>")
        lines.append("      </marking>")
        lines.append("    </finalmarkings>")
    lines.append("  </net>")
    lines.append("</pnml>")
    return "\n".join(lines) + "\n"
