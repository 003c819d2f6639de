"""The classification data: table rows, stabilizer families, witness
matrices and the relations between them, read from one text file.

Every non-comment line of the data file is a record

    KIND|positional|...|key=value|key=value

Positional fields come first and never contain '='; the value of a field
runs to the next '|'.  Comments and blank lines are kept verbatim so the
file round-trips bit-exactly through parse_text/dump_text.
"""
from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .exactfield import FieldElement, ZeroInverse, as_fe
from .expr import SCALAR_NAMES, ExprError, eval_matrix, eval_scalar, free_names
from .linalg3 import Mat3
from .liecore import FRAME_NAMES, Subalgebra, frame_symbols

FORMS = ("complex", "sl3r", "su21", "su3")
CLASSES = ("solvable", "semisimple", "levi")
RECORD_KINDS = (
    "MATRIX", "ENTRY", "STAB", "WITNESS", "DASHED", "EQUIV", "WIN", "SPEC", "H1",
    "TRUST", "FILTER", "ERRATUM", "COUNT",
)
# positional field names per record kind
_HEADS = {
    "MATRIX": ("name",),
    "ENTRY": ("id", "form", "dim", "class", "params"),
    "STAB": ("entry",),
    "WITNESS": ("entry", "kind"),
    "DASHED": ("a", "b"),
    "EQUIV": ("id",),
    "WIN": ("id",),
    "SPEC": ("id",),
    "H1": ("id",),
    "TRUST": ("id",),
    "FILTER": ("entry",),
    "ERRATUM": ("id",),
    "COUNT": ("form",),
}
WITNESS_KINDS = (
    "cocycle", "twist", "transport", "real_conjugator", "descent",
    "identity", "equivalence",
)


class RegistryError(ValueError):
    pass


class ExcludedParameter(ValueError):
    pass


class DomainViolation(ValueError):
    pass


class ConstraintViolation(ValueError):
    pass


class UnknownEntry(KeyError):
    pass


# -- records ------------------------------------------------------------

@dataclass(frozen=True)
class Record:
    kind: str  # one of RECORD_KINDS, or "#" for a verbatim comment/blank line
    head: tuple[str, ...] = ()
    fields: tuple[tuple[str, str], ...] = ()
    text: str = ""
    lineno: int = 0

    def get(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.fields:
            if k == key:
                return v
        return default

    def require(self, key: str) -> str:
        v = self.get(key)
        if v is None:
            raise RegistryError(f"line {self.lineno}: {self.kind} record lacks {key}=")
        return v

    def dump(self) -> str:
        if self.kind == "#":
            return self.text
        return "|".join([self.kind, *self.head, *(f"{k}={v}" for k, v in self.fields)])

    def to_json(self) -> dict:
        if self.kind == "#":
            return {"kind": "#", "text": self.text}
        return {"kind": self.kind, "head": list(self.head), "fields": dict(self.fields)}

    @classmethod
    def from_json(cls, d: Mapping) -> "Record":
        if d["kind"] == "#":
            return cls("#", text=d["text"])
        return cls(d["kind"], tuple(d["head"]), tuple((k, v) for k, v in d["fields"].items()))


def parse_line(line: str, lineno: int = 0) -> Record:
    if not line.strip() or line.lstrip().startswith("#"):
        return Record("#", text=line, lineno=lineno)
    parts = line.split("|")
    kind = parts[0]
    if kind not in RECORD_KINDS:
        raise RegistryError(f"line {lineno}: unknown record kind {kind!r}")
    want = len(_HEADS[kind])
    head = tuple(parts[1:1 + want])
    if len(head) != want or any("=" in h for h in head):
        raise RegistryError(f"line {lineno}: {kind} needs {want} positional fields")
    fields = []
    seen = set()
    for p in parts[1 + want:]:
        if "=" not in p:
            raise RegistryError(f"line {lineno}: field {p!r} is not key=value")
        k, v = p.split("=", 1)
        if k in seen:
            raise RegistryError(f"line {lineno}: duplicate field {k!r}")
        seen.add(k)
        fields.append((k, v))
    rec = Record(kind, head, tuple(fields), lineno=lineno)
    if rec.dump() != line:
        raise RegistryError(f"line {lineno}: record is not in canonical form")
    return rec


def parse_text(text: str) -> list[Record]:
    if not text.endswith("\n"):
        raise RegistryError("data file must end with a newline")
    return [parse_line(line, n) for n, line in enumerate(text[:-1].split("\n"), 1)]


def dump_text(records: Iterable[Record]) -> str:
    return "".join(r.dump() + "\n" for r in records)


def split_list(value: str | None, sep: str = ";") -> tuple[str, ...]:
    if not value:
        return ()
    return tuple(v for v in value.split(sep))


def _split_top(text: str, sep: str = ",") -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def parse_bindings(text: str) -> tuple[tuple[str, str], ...]:
    """'a=1/2+y*i,b=2' -> (('a', '1/2+y*i'), ('b', '2'))."""
    if not text:
        return ()
    out = []
    for part in _split_top(text):
        if "=" not in part:
            raise RegistryError(f"binding {part!r} is not name=expr")
        k, v = part.split("=", 1)
        out.append((k.strip(), v.strip()))
    return tuple(out)


@dataclass(frozen=True)
class Ref:
    """An entry reference with its parameters bound to expressions."""

    entry: str
    bindings: tuple[tuple[str, str], ...] = ()

    @classmethod
    def parse(cls, text: str) -> "Ref":
        text = text.strip()
        if "(" not in text:
            return cls(normalize_id(text))
        if not text.endswith(")"):
            raise RegistryError(f"bad entry reference {text!r}")
        k = text.index("(")
        return cls(normalize_id(text[:k]), parse_bindings(text[k + 1:-1]))

    def values(self, env: Mapping[str, FieldElement]) -> dict[str, FieldElement]:
        return {k: eval_scalar(v, env) for k, v in self.bindings}

    def __str__(self) -> str:
        if not self.bindings:
            return self.entry
        return f"{self.entry}(" + ",".join(f"{k}={v}" for k, v in self.bindings) + ")"


_LATEX_ID = re.compile(r"^([A-Za-z]+)_\{?(\d+)(?:,(\d+))?\}?(\^.*)?$")


def normalize_id(text: str) -> str:
    """Accept table labels like u_{3,8} or w_4 as well as u3.8 / w4."""
    text = text.strip()
    m = _LATEX_ID.match(text)
    if m and m.group(1) in ("u", "v", "w"):
        a, b = m.group(2), m.group(3)
        return f"{m.group(1)}{a}.{b}" if b else f"{m.group(1)}{a}"
    return text


def display_label(entry_id: str) -> str:
    m = re.match(r"^([uvw])(\d+)(?:\.(\d+))?$", entry_id)
    if not m:
        return entry_id
    if m.group(3):
        return f"{m.group(1)}_{{{m.group(2)},{m.group(3)}}}"
    return f"{m.group(1)}_{m.group(2)}"


# -- parameter specs ----------------------------------------------------

@dataclass(frozen=True)
class ParamSpec:
    names: tuple[str, ...] = ()
    domains: tuple[str, ...] = ()  # real | complex per name
    excluded: tuple[str, ...] = ()  # expressions that must not vanish

    @classmethod
    def parse(cls, head: str, exclude: str | None) -> "ParamSpec":
        if head in ("", "-"):
            names, doms = (), ()
        else:
            pairs = [p.split(":") for p in head.split(",")]
            if any(len(p) != 2 or p[1] not in ("real", "complex") for p in pairs):
                raise RegistryError(f"bad parameter spec {head!r}")
            names = tuple(p[0] for p in pairs)
            doms = tuple(p[1] for p in pairs)
        return cls(names, doms, split_list(exclude))

    def domain(self, name: str) -> str:
        return self.domains[self.names.index(name)]

    def check(self, values: Mapping[str, FieldElement]) -> dict[str, FieldElement]:
        vals = {k: as_fe(v) if not isinstance(v, FieldElement) else v for k, v in values.items()}
        missing = [n for n in self.names if n not in vals]
        extra = [n for n in vals if n not in self.names]
        if missing or extra:
            raise DomainViolation(f"parameters {sorted(self.names)} expected, got {sorted(vals)}")
        for n, d in zip(self.names, self.domains):
            if d == "real" and not vals[n].is_real():
                raise DomainViolation(f"{n} must be real")
        for ex in self.excluded:
            try:
                z = eval_scalar(ex, vals).is_zero()
            except (ZeroDivisionError, ZeroInverse):
                z = True
            if z:
                raise ExcludedParameter(f"{ex} vanishes at {_fmt_values(vals)}")
        return vals


def _fmt_values(vals: Mapping[str, FieldElement]) -> str:
    return ", ".join(f"{k}={v}" for k, v in sorted(vals.items()))


# -- typed views --------------------------------------------------------

_SYMBOLS = frame_symbols()
_FRAME_OF = {s: k for k, names in FRAME_NAMES.items() for s in names}


@dataclass(frozen=True)
class TableEntry:
    id: str
    form: str
    dim: int
    structural_class: str
    params: ParamSpec
    basis_exprs: tuple[str, ...]
    cite: str
    source: Ref | None = None
    via: str = ""
    dashed_partner: str | None = None
    aux: bool = False
    table: str = ""

    @property
    def label(self) -> str:
        return display_label(self.id)

    @property
    def frame(self) -> str:
        frames = {_FRAME_OF[n] for e in self.basis_exprs for n in free_names(e) if n in _FRAME_OF}
        return frames.pop() if len(frames) == 1 else "chevalley"


@dataclass(frozen=True)
class StabilizerFamily:
    entry_id: str
    branch: str
    at: tuple[tuple[str, str], ...]  # entry parameter bindings; '*' = sample
    avoid: tuple[str, ...]
    pattern: str
    free: tuple[str, ...]
    derive: tuple[tuple[str, str], ...]
    constraints: tuple[str, ...]
    cite: str

    @property
    def param_dim(self) -> int:
        return len(self.free)

    @property
    def id(self) -> str:
        return f"{self.entry_id}#{self.branch}"

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.free + tuple(k for k, _ in self.derive)


@dataclass(frozen=True)
class Witness:
    id: str
    entry: str
    kind: str
    matrices: tuple[tuple[str, str], ...]  # role -> matrix expression
    fields: tuple[tuple[str, str], ...]
    cite: str

    def get(self, key: str, default: str | None = None) -> str | None:
        for k, v in self.fields:
            if k == key:
                return v
        return default

    def matrix_names(self) -> set[str]:
        return {n for _, e in self.matrices for n in free_names(e)} - set(_SYMBOLS) - set(SCALAR_NAMES)


_MATRIX_ROLES = ("g", "g0", "g1", "h", "z1", "z2", "lhs", "rhs")


class Registry:
    """Immutable view over the parsed records."""

    def __init__(self, text: str, origin: str = "<memory>"):
        self.text = text
        self.origin = origin
        self.records = tuple(parse_text(text))
        self.fingerprint = hashlib.sha256(text.encode()).hexdigest()
        self.matrix_exprs: dict[str, str] = {}
        self.matrices: dict[str, Mat3] = {}
        self.matrix_cites: dict[str, str] = {}
        self.entries: dict[str, TableEntry] = {}
        self.stabilizers: list[StabilizerFamily] = []
        self.witnesses: list[Witness] = []
        self.other: dict[str, list[Record]] = {}
        self._build()

    # -- loading ------------------------------------------------------
    def _build(self) -> None:
        counts: dict[tuple[str, str], int] = {}
        for r in self.records:
            if r.kind == "#":
                continue
            try:
                self._add(r, counts)
            except (ExprError, ZeroDivisionError, DomainViolation, ExcludedParameter) as exc:
                raise RegistryError(f"line {r.lineno}: {exc}") from None
        for e in self.entries.values():
            if e.source is not None and e.source.entry not in self.entries:
                raise RegistryError(f"{e.id}: unknown source {e.source.entry}")
            if e.dashed_partner and e.dashed_partner not in self.entries:
                raise RegistryError(f"{e.id}: unknown dashed partner {e.dashed_partner}")
        for s in self.stabilizers:
            if s.entry_id not in self.entries:
                raise RegistryError(f"stabilizer for unknown entry {s.entry_id}")
        for w in self.witnesses:
            if w.entry not in self.entries:
                raise RegistryError(f"witness {w.id} for unknown entry {w.entry}")
            unknown = w.matrix_names() - set(self.matrices) - {"I"}
            if unknown:
                raise RegistryError(f"witness {w.id} uses unknown matrices {sorted(unknown)}")

    def _add(self, r: Record, counts: dict) -> None:
        cite = r.require("cite")
        if r.kind == "MATRIX":
            name = r.head[0]
            if name in self.matrices or name in _SYMBOLS or name == "I":
                raise RegistryError(f"line {r.lineno}: matrix name {name!r} reused")
            expr = r.require("value")
            self.matrices[name] = eval_matrix(expr, self.matrix_env())
            self.matrix_exprs[name] = expr
            self.matrix_cites[name] = cite
        elif r.kind == "ENTRY":
            eid, form, dim, cls, params = r.head
            if eid in self.entries:
                raise RegistryError(f"line {r.lineno}: duplicate entry {eid}")
            if form not in FORMS or cls not in CLASSES:
                raise RegistryError(f"line {r.lineno}: bad form/class {form}/{cls}")
            src = r.get("from")
            e = TableEntry(
                id=eid, form=form, dim=int(dim), structural_class=cls,
                params=ParamSpec.parse(params, r.get("exclude")),
                basis_exprs=split_list(r.require("basis")), cite=cite,
                source=Ref.parse(src) if src else None, via=r.get("via", ""),
                dashed_partner=r.get("partner"), aux=r.get("aux") == "1",
                table=r.get("table", ""),
            )
            self.entries[eid] = e
        elif r.kind == "STAB":
            eid = r.head[0]
            branch = r.get("branch", "main")
            self.stabilizers.append(StabilizerFamily(
                entry_id=eid, branch=branch, at=parse_bindings(r.get("at", "")),
                avoid=split_list(r.get("avoid")), pattern=r.require("pattern"),
                free=tuple(split_list(r.get("free"), ",")),
                derive=tuple(parse_bindings(r.get("derive", "").replace(";", ","))),
                constraints=split_list(r.get("constraint")), cite=cite,
            ))
        elif r.kind == "WITNESS":
            eid, kind = r.head
            if kind not in WITNESS_KINDS:
                raise RegistryError(f"line {r.lineno}: unknown witness kind {kind!r}")
            n = counts.get((eid, kind), 0) + 1
            counts[(eid, kind)] = n
            mats = tuple((k, v) for k, v in r.fields if k in _MATRIX_ROLES)
            rest = tuple((k, v) for k, v in r.fields if k not in _MATRIX_ROLES and k != "cite")
            self.witnesses.append(Witness(f"{eid}:{kind}:{n}", eid, kind, mats, rest, cite))
        else:
            self.other.setdefault(r.kind, []).append(r)

    def matrix_env(self) -> dict[str, object]:
        env: dict[str, object] = dict(_SYMBOLS)
        env["I"] = Mat3.identity()
        env.update(self.matrices)
        return env

    def eval_matrix(self, expr: str, extra: Mapping[str, object] | None = None) -> Mat3:
        env = self.matrix_env()
        if extra:
            env.update(extra)
        return eval_matrix(expr, env)

    # -- queries ------------------------------------------------------
    def entry(self, entry_id: str) -> TableEntry:
        key = normalize_id(entry_id)
        if key not in self.entries:
            raise UnknownEntry(entry_id)
        return self.entries[key]

    def records_of(self, kind: str) -> list[Record]:
        return list(self.other.get(kind, []))

    def to_json(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "records": [r.to_json() for r in self.records],
        }

    def with_records(self, records: Sequence[Record], origin: str = "<modified>") -> "Registry":
        return Registry(dump_text(records), origin)


def registry_from_json(doc: Mapping) -> Registry:
    return Registry(dump_text(Record.from_json(d) for d in doc["records"]), "<json>")


def export_json(reg: Registry, path: str | Path) -> None:
    Path(path).write_text(json.dumps(reg.to_json(), indent=1, ensure_ascii=False) + "\n")


def _data_text() -> tuple[str, str]:
    override = os.environ.get("LIE3CERT_REGISTRY")
    if override:
        return Path(override).read_text(), override
    ref = resources.files("lie3cert").joinpath("data/registry.txt")
    return ref.read_text(), "lie3cert/data/registry.txt"


@lru_cache(maxsize=4)
def _load_cached(text: str, origin: str) -> Registry:
    return Registry(text, origin)


def load_registry(path: str | Path | None = None) -> Registry:
    if path is not None:
        return _load_cached(Path(path).read_text(), str(path))
    return _load_cached(*_data_text())


# -- module-level operations --------------------------------------------

def enumerate_entries(form: str, include_aux: bool = False,
                      reg: Registry | None = None) -> list[TableEntry]:
    reg = reg or load_registry()
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}")
    return [e for e in reg.entries.values() if e.form == form and (include_aux or not e.aux)]


def instantiate(e: TableEntry, values: Mapping[str, object] | None = None) -> Subalgebra:
    vals = e.params.check(values or {})
    env: dict[str, object] = dict(_SYMBOLS)
    env.update(vals)
    mats = [eval_matrix(x, env) for x in e.basis_exprs]
    return Subalgebra.from_matrices(mats, label=e.id, frame_hint=e.frame, real=e.form != "complex")


def complete_sample(s: StabilizerFamily, free_values: Mapping[str, object]) -> dict[str, FieldElement]:
    """Extend values of the free symbols by the derived ones, in order."""
    vals = {k: as_fe(v) if not isinstance(v, FieldElement) else v for k, v in free_values.items()}
    for name, expr in s.derive:
        vals[name] = eval_scalar(expr, vals)
    return vals


def stabilizer_sample(s: StabilizerFamily, values: Mapping[str, object]) -> Mat3:
    vals = {k: as_fe(v) if not isinstance(v, FieldElement) else v for k, v in values.items()}
    missing = [n for n in s.symbols if n not in vals]
    if missing:
        raise ConstraintViolation(f"missing pattern symbols {missing}")
    for c in s.constraints:
        lhs, rhs = c.split("=", 1) if "=" in c else (c, "0")
        if eval_scalar(lhs, vals) != eval_scalar(rhs, vals):
            raise ConstraintViolation(f"{c} fails at {_fmt_values(vals)}")
    g = eval_matrix(s.pattern, vals)
    if not g.det() == as_fe(1):
        raise ConstraintViolation(f"determinant {g.det()} at {_fmt_values(vals)}")
    return g


def witnesses_for(entry_id: str, reg: Registry | None = None) -> list[Witness]:
    """Stored witnesses touching an entry, including the conjugator from its
    complex source row."""
    reg = reg or load_registry()
    e = reg.entry(entry_id)
    out = []
    if e.source is not None and e.via and e.via != "I":
        out.append(Witness(f"{e.id}:source", e.id, "transport", (("g", e.via),),
                           (("source", str(e.source)), ("target", e.id)), e.cite))
    for w in reg.witnesses:
        refs = [w.entry] + [Ref.parse(w.get(k)).entry for k in ("source", "target") if w.get(k)]
        if e.id in refs:
            out.append(w)
    return out


__all__ = [
    "Registry", "Record", "Ref", "TableEntry", "ParamSpec", "StabilizerFamily", "Witness",
    "RegistryError", "ExcludedParameter", "DomainViolation", "ConstraintViolation",
    "UnknownEntry", "load_registry", "enumerate_entries", "instantiate", "stabilizer_sample",
    "witnesses_for", "complete_sample", "parse_text", "dump_text", "export_json", "registry_from_json",
    "normalize_id", "display_label", "parse_bindings", "split_list", "FORMS",
]
