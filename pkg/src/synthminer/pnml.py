"""PNML import/export and DOT export for workflow nets.

Silent transitions are written without a ``<name>``. On import the
source/sink/start/end roles are recovered from the structure.
"""

from __future__ import annotations

import os
import xml.etree.ElementTree as ET
from typing import IO

from .petri_net import LabeledNet, NetStructureError, WorkflowNet, infer_workflow_net

PTNET = "http://www.pnml.org/version-2009/grammar/ptnet"
_INVISIBLE = "$invisible$"  # marker used by some other tools for silent steps


class PnmlError(ValueError):
    pass


def _text(parent, tag, value):
    el = ET.SubElement(parent, tag)
    ET.SubElement(el, "text").text = str(value)
    return el


def to_pnml_string(w: WorkflowNet, net_id: str = "net") -> str:
    root = ET.Element("pnml")
    net = ET.SubElement(root, "net", id=net_id, type=PTNET)
    page = ET.SubElement(net, "page", id="page")
    for p in sorted(w.places):
        el = ET.SubElement(page, "place", id=p)
        if isinstance(w, WorkflowNet) and p == w.source:
            _text(el, "initialMarking", 1)
    for t in sorted(w.transitions):
        el = ET.SubElement(page, "transition", id=t)
        if not w.is_silent(t):
            _text(el, "name", w.label(t))
    for i, (x, y) in enumerate(sorted(w.arcs)):
        ET.SubElement(page, "arc", id=f"a{i}", source=x, target=y)
    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def write_pnml(w: WorkflowNet, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(to_pnml_string(w))


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _children(el, name):
    return [c for c in el if _local(c.tag) == name]


def _name_text(el):
    for n in _children(el, "name"):
        for t in _children(n, "text"):
            return (t.text or "").strip()
    return None


def _is_marked_invisible(el) -> bool:
    return any(c.get("activity") == _INVISIBLE for c in _children(el, "toolspecific"))


def parse_pnml_net(text: str | bytes) -> LabeledNet:
    """Parse a PNML document into a plain :class:`LabeledNet`; raises
    :class:`PnmlError` for malformed XML or dangling arcs."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, col = exc.position
        raise PnmlError(f"malformed PNML at line {line}, column {col}: {exc}") from None
    nets = [el for el in root.iter() if _local(el.tag) == "net"]
    if len(nets) != 1:
        raise PnmlError(f"expected exactly one <net>, found {len(nets)}")
    places, transitions, labels, arcs = set(), set(), {}, set()
    for el in nets[0].iter():
        kind = _local(el.tag)
        if kind == "place":
            places.add(el.get("id"))
        elif kind == "transition":
            t = el.get("id")
            transitions.add(t)
            name = _name_text(el)
            if name and not _is_marked_invisible(el):
                labels[t] = name
        elif kind == "arc":
            arcs.add((el.get("source"), el.get("target")))
    if None in places or None in transitions:
        raise PnmlError("place or transition without id")
    nodes = places | transitions
    for x, y in sorted(arcs, key=str):
        if x not in nodes or y not in nodes:
            raise PnmlError(f"arc {x} -> {y} refers to an unknown node")
    try:
        net = LabeledNet(places, transitions, arcs, labels)
    except NetStructureError as exc:
        raise PnmlError(str(exc)) from None
    return net


def parse_pnml(text: str | bytes) -> WorkflowNet:
    """Like :func:`parse_pnml_net`, then recover the workflow roles; raises
    :class:`NetStructureError` if the net is not a workflow net."""
    return infer_workflow_net(parse_pnml_net(text))


def read_pnml_net(path: str | os.PathLike) -> LabeledNet:
    with open(path, "rb") as fh:
        return parse_pnml_net(fh.read())


def read_pnml(path: str | os.PathLike) -> WorkflowNet:
    return infer_workflow_net(read_pnml_net(path))


def _quote(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(w: LabeledNet, name: str = "net") -> str:
    lines = [f"digraph {_quote(name)} {{", "  rankdir=LR;"]
    for p in sorted(w.places):
        lines.append(f'  {_quote(p)} [shape=circle, label="", xlabel={_quote(p)}];')
    for t in sorted(w.transitions):
        if w.is_silent(t):
            lines.append(f'  {_quote(t)} [shape=box, style=filled, fillcolor=black, label="", width=0.15];')
        else:
            lines.append(f"  {_quote(t)} [shape=box, label={_quote(w.label(t))}];")
    for x, y in sorted(w.arcs):
        lines.append(f"  {_quote(x)} -> {_quote(y)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(w: LabeledNet, target: str | os.PathLike | IO[str]) -> None:
    if hasattr(target, "write"):
        target.write(to_dot(w))
        return
    with open(target, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(to_dot(w))
