"""Plain-text group files.

Grammar (one statement per line; ``#`` starts a comment; blank lines ignored)::

    file         = { line } ;
    line         = [ statement ] [ comment ] newline ;
    statement    = name | presentation | generator | parabolic | signature ;
    name         = "name" ident ;
    presentation = "presentation" ( "free-rank-2" | "involutions-3" ) ;
    generator    = "generator" ident number number number number ;
    parabolic    = "parabolic" number number number number ;
    signature    = "signature" int "," int { "," int } ;
    number       = int | decimal ;
    ident        = letter { letter | digit | "_" | "-" } ;

``presentation`` and exactly two (free-rank-2) or three (involutions-3)
``generator`` lines are required; generators are listed in order a b c d of
the matrix [[a, b], [c, d]].  ``parabolic`` and ``signature`` are optional and
are inferred from the presentation when absent.  If every entry of every matrix
is an integer the group is exact; otherwise all arithmetic is in floating point.
Loading runs the relation checks, including the scan for short relators.
"""
from __future__ import annotations

import re
from pathlib import Path

from .groups import PRESENTATIONS, PresentedGroup, Signature, make_group
from .moebius import MoebiusMap

_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9_\-]*$")
_INT = re.compile(r"^[+-]?\d+$")
_DEC = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")


class GroupFileError(ValueError):
    pass


def _number(tok: str, where: str):
    if _INT.match(tok):
        return int(tok)
    if _DEC.match(tok):
        return float(tok)
    raise GroupFileError(f"{where}: {tok!r} is not a number")


def _matrix(toks: list[str], where: str) -> tuple:
    if len(toks) != 4:
        raise GroupFileError(f"{where}: expected four matrix entries, got {len(toks)}")
    return tuple(_number(t, where) for t in toks)


def parse_group_text(text: str, source: str = "<string>") -> PresentedGroup:
    name = None
    presentation = None
    gens: dict[str, tuple] = {}
    parabolic = None
    signature = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        where = f"{source}:{lineno}"
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *rest = line.split()
        if key == "name":
            if len(rest) != 1 or not _IDENT.match(rest[0]):
                raise GroupFileError(f"{where}: bad name")
            name = rest[0]
        elif key == "presentation":
            if len(rest) != 1 or rest[0] not in PRESENTATIONS:
                raise GroupFileError(f"{where}: presentation must be one of {', '.join(PRESENTATIONS)}")
            presentation = rest[0]
        elif key == "generator":
            if not rest or not _IDENT.match(rest[0]):
                raise GroupFileError(f"{where}: bad generator name")
            if rest[0] in gens:
                raise GroupFileError(f"{where}: duplicate generator {rest[0]!r}")
            gens[rest[0]] = _matrix(rest[1:], where)
        elif key == "parabolic":
            parabolic = _matrix(rest, where)
        elif key == "signature":
            try:
                signature = Signature.parse("".join(rest))
            except ValueError as exc:
                raise GroupFileError(f"{where}: {exc}") from None
        else:
            raise GroupFileError(f"{where}: unknown statement {key!r}")
    if presentation is None:
        raise GroupFileError(f"{source}: missing presentation")
    entries = [x for m in list(gens.values()) + ([parabolic] if parabolic else []) for x in m]
    exact = all(isinstance(x, int) for x in entries)
    conv = (lambda x: x) if exact else float
    try:
        mats = {k: MoebiusMap.of(*map(conv, v)) for k, v in gens.items()}
        par = MoebiusMap.of(*map(conv, parabolic)) if parabolic else None
        return make_group(name or Path(source).stem, presentation, mats, signature, par, check=True)
    except (ValueError, RuntimeError) as exc:
        raise GroupFileError(f"{source}: {exc}") from None


def load_group_file(path) -> PresentedGroup:
    path = Path(path)
    return parse_group_text(path.read_text(), str(path))


def _fmt(x) -> str:
    return str(x) if isinstance(x, int) else repr(float(x))


def export_group_text(group: PresentedGroup) -> str:
    lines = [f"name {group.name}", f"presentation {group.presentation}"]
    for n, g in zip(group.generator_names, group.generators):
        lines.append(f"generator {n} " + " ".join(_fmt(x) for x in g.entries()))
    if group.cusp is not None:
        lines.append("parabolic " + " ".join(_fmt(x) for x in group.cusp.parabolic.entries()))
    sig = group.signature
    lines.append("signature " + ",".join(str(x) for x in (sig.g, sig.n, *sig.m)))
    return "\n".join(lines) + "\n"
