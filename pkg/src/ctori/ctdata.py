"""The ctdata-v1 document format (and oracle-v1 companion).

A ctdata document is line-oriented, human-writable text; '#' starts a
comment, blank lines are ignored.  The canonical serializer emits sections
in a fixed order with canonical element/place ordering, so parse ->
serialize is byte-identical on canonical documents and any document
round-trips to its canonical form.

    ctdata-v1 torus                  # or: ctdata-v1 sheaf
    [group]
    degree 2
    element images 0 1
    element images 1 0
    [generic]
    rank 1
    action 0 [[1]]
    action 1 [[-1]]
    [arch oo]
    kind real
    conjugation 1
    [bad 2]
    q 2
    decomposition 0 1
    inertia 0 1
    frobenius 0
    filtration 0 1 | 0
    fiber rank 1
    fiber order 2
    fiber frobenius [[-1]]
    matrix [[1]]
    [fields]
    field 0 = Q(i)
    field 0 1 = Q

Group elements may be given in image or cycle notation and need only
generate the group.  ``frobenius`` is the element index acting as the
geometric Frobenius.  ``filtration`` lists the lower-numbering ramification
subgroups separated by '|' (omit the line at tame places).  ``matrix`` is
the specialization (sheaf documents) or comparison (torus documents) in the
canonical bases.  The optional [fields] section assigns number-field labels
to subgroup conjugacy classes for special-value computations.

Oracle files (oracle-v1) come in abelian and table modes:

    oracle-v1 abelian
    modulus 4
    map 1 = 0
    map 3 = 1
    [override 2]
    q 2
    decomposition 0 1
    inertia 0 1
    frobenius 0
    filtration 0 1 | 0

    oracle-v1 table
    bound 100
    place 2 q=2 frobenius=0
    place 9 q=9 frobenius=1
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Union

from .constructible import (
    ArchPlaceData,
    BadPlaceData,
    CTorusData,
    PlaceCtx,
    SheafPlace,
    TfSheafData,
    TorusPlace,
)
from .groups import FiniteGroup, Subgroup, parse_permutation
from .lattices import FinAbFrob, GLattice, IntMatrix
from .l_series import AbelianOracle, TableOracle


class FormatError(ValueError):
    pass


Data = Union[TfSheafData, CTorusData]


@dataclass
class CtDocument:
    data: Data
    fields: dict[tuple[int, ...], str] = field(default_factory=dict)


def _matrix_to_str(M: IntMatrix) -> str:
    if M.rows == 0 or M.cols == 0:
        return f"zeros {M.rows}x{M.cols}"
    return json.dumps([list(r) for r in M.entries]).replace(" ", "")


def _matrix_from_str(s: str, rows: int, cols: int) -> IntMatrix:
    s = s.strip()
    if s.startswith("zeros"):
        r, _, c = s[len("zeros"):].strip().partition("x")
        M = IntMatrix.zeros(int(r), int(c))
    else:
        data = json.loads(s)
        M = IntMatrix.zeros(rows, cols) if data == [] else IntMatrix(data)
    if M.rows != rows or M.cols != cols:
        raise FormatError(f"matrix must be {rows}x{cols}, got {M.rows}x{M.cols}")
    return M


def _lines(text: str) -> list[str]:
    out = []
    for raw in text.splitlines():
        ln = raw.split("#", 1)[0].rstrip()
        if ln.strip():
            out.append(ln.strip())
    return out


def _split_sections(lines: list[str]) -> tuple[str, list[tuple[str, list[str]]]]:
    if not lines or not lines[0].startswith("ctdata-v1"):
        raise FormatError("not a ctdata-v1 document")
    kind = lines[0].split()[1] if len(lines[0].split()) > 1 else ""
    if kind not in ("torus", "sheaf"):
        raise FormatError("document kind must be 'torus' or 'sheaf'")
    sections = []
    current = None
    for ln in lines[1:]:
        if ln.startswith("["):
            if not ln.endswith("]"):
                raise FormatError(f"malformed section header {ln!r}")
            current = (ln[1:-1].strip(), [])
            sections.append(current)
        else:
            if current is None:
                raise FormatError(f"content before the first section: {ln!r}")
            current[1].append(ln)
    return kind, sections


def _parse_subgroup(G: FiniteGroup, tokens: list[str], what: str) -> Subgroup:
    try:
        members = sorted(int(t) for t in tokens)
    except ValueError:
        raise FormatError(f"{what}: member indices must be integers") from None
    return Subgroup(G, members)


def parse_ctdata(text: str) -> CtDocument:
    kind, sections = _split_sections(_lines(text))
    group: FiniteGroup | None = None
    generic: GLattice | None = None
    arch: list[ArchPlaceData] = []
    bad: list[tuple] = []
    fields_map: dict[tuple[int, ...], str] = {}

    for name, body in sections:
        head = name.split()
        if head[0] == "group":
            degree = None
            perms = []
            for ln in body:
                key, _, rest = ln.partition(" ")
                if key == "degree":
                    degree = int(rest)
                elif key == "element":
                    if degree is None:
                        raise FormatError("group degree must precede elements")
                    perms.append(parse_permutation(degree, rest.strip()))
                else:
                    raise FormatError(f"unknown group line {ln!r}")
            if degree is None:
                raise FormatError("group section missing degree")
            group = FiniteGroup.generated(degree, perms)
        elif head[0] == "generic":
            if group is None:
                raise FormatError("[generic] must follow [group]")
            rank = None
            actions: dict[int, IntMatrix] = {}
            for ln in body:
                key, _, rest = ln.partition(" ")
                if key == "rank":
                    rank = int(rest)
                elif key == "action":
                    idx_s, _, mat_s = rest.partition(" ")
                    if rank is None:
                        raise FormatError("rank must precede actions")
                    actions[int(idx_s)] = _matrix_from_str(mat_s, rank, rank)
                else:
                    raise FormatError(f"unknown generic line {ln!r}")
            if rank is None:
                raise FormatError("generic section missing rank")
            if sorted(actions) != list(range(group.order)):
                raise FormatError("generic section must give one action per group element")
            generic = GLattice(group, rank, [actions[i] for i in range(group.order)])
        elif head[0] == "arch":
            if group is None:
                raise FormatError("[arch] must follow [group]")
            label = name[len("arch"):].strip()
            fieldsd = dict(ln.partition(" ")[::2] for ln in body)
            arch.append(ArchPlaceData(label, fieldsd.get("kind", "real").strip(),
                                      int(fieldsd.get("conjugation", "0"))))
        elif head[0] == "bad":
            if group is None or generic is None:
                raise FormatError("[bad] must follow [group] and [generic]")
            label = name[len("bad"):].strip()
            bad.append(_parse_bad_section(group, generic, kind, label, body))
        elif head[0] == "fields":
            for ln in body:
                if not ln.startswith("field "):
                    raise FormatError(f"unknown fields line {ln!r}")
                lhs, _, rhs = ln[len("field "):].partition("=")
                key = tuple(sorted(int(t) for t in lhs.split()))
                fields_map[key] = rhs.strip()
        else:
            raise FormatError(f"unknown section [{name}]")

    if group is None or generic is None:
        raise FormatError("document needs [group] and [generic] sections")
    if kind == "torus":
        data: Data = CTorusData(group, generic, arch, [TorusPlace(*b) for b in bad])
    else:
        data = TfSheafData(group, generic, arch, [SheafPlace(*b) for b in bad])
    return CtDocument(data, fields_map)


def _collect_place_values(body: list[str]) -> dict[str, str]:
    vals: dict[str, str] = {}
    for ln in body:
        key, _, rest = ln.partition(" ")
        if key == "fiber":
            sub, _, rest2 = rest.strip().partition(" ")
            vals[f"fiber_{sub}"] = rest2.strip()
        else:
            vals[key] = rest.strip()
    return vals


def _parse_place_block(G: FiniteGroup, label: str, vals: dict[str, str]) -> BadPlaceData:
    try:
        q = int(vals["q"])
        D = _parse_subgroup(G, vals["decomposition"].split(), f"place {label} decomposition")
        I = _parse_subgroup(G, vals["inertia"].split(), f"place {label} inertia")
        frob = int(vals["frobenius"])
    except KeyError as e:
        raise FormatError(f"place {label}: missing {e.args[0]}") from None
    filtration = None
    if "filtration" in vals:
        chain = []
        for part in vals["filtration"].split("|"):
            chain.append(_parse_subgroup(G, part.split(), f"place {label} filtration"))
        filtration = tuple(chain)
    return BadPlaceData(label, q, D, I, frob, filtration)


def _parse_bad_section(G: FiniteGroup, generic: GLattice, kind: str,
                       label: str, body: list[str]):
    import warnings as _warnings

    from .constructible import ComponentGroup, WildReductionWarning
    from .lattices import invariants

    vals = _collect_place_values(body)
    place = _parse_place_block(G, label, vals)
    rank = int(vals.get("fiber_rank", "0"))
    order = int(vals.get("fiber_order", "1"))
    frob_mat = _matrix_from_str(vals.get("fiber_frobenius", "[]"), rank, rank)
    fiber = FinAbFrob((), rank, frob_mat, order, place.q)
    if kind == "sheaf":
        rows = invariants(generic, place.inertia).rank
        cols = rank
    else:
        with _warnings.catch_warnings():
            _warnings.simplefilter("ignore", WildReductionWarning)
            cols = ComponentGroup(generic, place).free_rank
        rows = rank
    M = _matrix_from_str(vals.get("matrix", f"zeros {rows}x{cols}"), rows, cols)
    return place, fiber, M


def serialize_ctdata(doc_or_data: Union[CtDocument, Data],
                     fields: dict[tuple[int, ...], str] | None = None) -> str:
    """Canonical text form of a sheaf/torus document."""
    if isinstance(doc_or_data, CtDocument):
        data = doc_or_data.data
        fields = dict(doc_or_data.fields)
    else:
        data = doc_or_data
        fields = dict(fields or {})
    kind = data.kind
    G = data.group
    gen = data.generic if isinstance(data, TfSheafData) else data.characters
    lines = [f"ctdata-v1 {kind}", "[group]", f"degree {G.degree}"]
    for e in G.elements:
        lines.append("element images " + " ".join(str(i) for i in e))
    lines.append("[generic]")
    lines.append(f"rank {gen.rank}")
    for i, A in enumerate(gen.action):
        lines.append(f"action {i} {_matrix_to_str(A)}")
    for a in sorted(data.arch_places, key=lambda a: a.label):
        lines.append(f"[arch {a.label}]")
        lines.append(f"kind {a.kind}")
        lines.append(f"conjugation {a.conjugation}")
    for entry in data.bad_places:
        v = entry.place
        lines.append(f"[bad {v.label}]")
        lines.append(f"q {v.q}")
        lines.append("decomposition " + " ".join(str(i) for i in v.decomposition.members))
        lines.append("inertia " + " ".join(str(i) for i in v.inertia.members))
        lines.append(f"frobenius {v.frobenius}")
        if v.filtration is not None:
            lines.append("filtration " + " | ".join(
                " ".join(str(i) for i in H.members) for H in v.filtration))
        fib = entry.fiber
        lines.append(f"fiber rank {fib.free_rank}")
        lines.append(f"fiber order {fib.order}")
        lines.append(f"fiber frobenius {_matrix_to_str(fib.frob)}")
        M = entry.specialization if isinstance(entry, SheafPlace) else entry.comparison
        lines.append(f"matrix {_matrix_to_str(M)}")
    if fields:
        lines.append("[fields]")
        for key in sorted(fields):
            lines.append("field " + " ".join(str(i) for i in key) + " = " + fields[key])
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Oracle files
# ---------------------------------------------------------------------------

def parse_oracle(text: str, group: FiniteGroup):
    lines = _lines(text)
    if not lines or not lines[0].startswith("oracle-v1"):
        raise FormatError("not an oracle-v1 document")
    mode = lines[0].split()[1] if len(lines[0].split()) > 1 else ""
    if mode == "abelian":
        modulus = None
        residue_map: dict[int, int] = {}
        overrides: dict[int, BadPlaceData] = {}
        i = 1
        current_override: tuple[int, list[str]] | None = None
        blocks: list[tuple[int, list[str]]] = []
        for ln in lines[1:]:
            if ln.startswith("[override"):
                p = int(ln[len("[override"):-1].strip())
                current_override = (p, [])
                blocks.append(current_override)
            elif current_override is not None:
                current_override[1].append(ln)
            elif ln.startswith("modulus"):
                modulus = int(ln.split()[1])
            elif ln.startswith("map"):
                lhs, _, rhs = ln[len("map"):].partition("=")
                residue_map[int(lhs)] = int(rhs)
            else:
                raise FormatError(f"unknown oracle line {ln!r}")
        if modulus is None:
            raise FormatError("abelian oracle missing modulus")
        for p, body in blocks:
            overrides[p] = _parse_place_block(group, str(p), _collect_place_values(body))
        return AbelianOracle(group, modulus, residue_map, overrides)
    if mode == "table":
        bound = None
        entries = []
        from .groups import trivial_subgroup
        for ln in lines[1:]:
            if ln.startswith("bound"):
                bound = int(ln.split()[1])
            elif ln.startswith("place"):
                toks = ln.split()
                label = toks[1]
                kv = dict(t.split("=", 1) for t in toks[2:])
                entries.append(PlaceCtx(label, int(kv["q"]), trivial_subgroup(group),
                                        int(kv["frobenius"])))
            else:
                raise FormatError(f"unknown oracle line {ln!r}")
        if bound is None:
            raise FormatError("table oracle missing bound")
        return TableOracle(group, entries, bound)
    raise FormatError("oracle mode must be 'abelian' or 'table'")


def serialize_oracle(oracle) -> str:
    if isinstance(oracle, AbelianOracle):
        lines = ["oracle-v1 abelian", f"modulus {oracle.modulus}"]
        for a in sorted(oracle.residue_map):
            lines.append(f"map {a} = {oracle.residue_map[a]}")
        for p in sorted(oracle.overrides):
            v = oracle.overrides[p]
            lines.append(f"[override {p}]")
            lines.append(f"q {v.q}")
            lines.append("decomposition " + " ".join(str(i) for i in v.decomposition.members))
            lines.append("inertia " + " ".join(str(i) for i in v.inertia.members))
            lines.append(f"frobenius {v.frobenius}")
            if v.filtration is not None:
                lines.append("filtration " + " | ".join(
                    " ".join(str(i) for i in H.members) for H in v.filtration))
        return "\n".join(lines) + "\n"
    if isinstance(oracle, TableOracle):
        lines = ["oracle-v1 table", f"bound {oracle.bound}"]
        for e in oracle.entries:
            lines.append(f"place {e.label} q={e.q} frobenius={e.frobenius}")
        return "\n".join(lines) + "\n"
    raise FormatError(f"cannot serialize oracle of type {type(oracle)!r}")
