"""JSON reading and writing for groupoids, kits, profunctors, presheaves and species.

Formats (UTF-8 JSON):

* groupoid: ``{"kind": "groupoid", "objects": [...], "morphisms": [{"id", "src", "tgt"}],
  "compose": [[g, f, g∘f]], "inverse": [[f, f⁻¹]], "identities": {obj: id}}``
* kit: ``{"kind": "kit", "groupoid": ref, "family": {obj: [[morphism ids]]}}``
* profunctor: ``{"kind": "profunctor", "source": ref, "target": ref, "elems": {"b|a": [ids]},
  "left": [[α, p, α·p]], "right": [[p, β, p·β]]}``
* presheaf: ``{"kind": "presheaf", "groupoid": ref, "sections": {obj: [ids]}, "action": [[x, α, x·α]]}``

A groupoid ref is a bundled fixture name ("C6"), a path to a JSON file, an
inline groupoid object, or ``"sym(<ref>,<L>)"``. Over a Sym groupoid objects
are written as JSON lists of base object names and morphisms as
``[[permutation], [base morphism ids]]``.
"""
from __future__ import annotations

import json
import re
from pathlib import Path

from .errors import ParseError
from .groupoid import Groupoid, validate_groupoid
from .kits import Kit, validate_kit
from .presheaf import Presheaf
from .profunctor import Profunctor
from .sym import SymGroupoid, build_sym

FIXTURE_DIR = Path(__file__).parent / "fixtures"

_SYM_REF = re.compile(r"^sym\((.+),\s*(\d+)\)$")


def _compact(x):
    return json.dumps(x, sort_keys=True, ensure_ascii=False)


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, one top-level field per line, long lists one row per line."""
    if not isinstance(obj, dict):
        return _compact(obj) + "\n"
    lines = []
    for k in sorted(obj):
        v = obj[k]
        if isinstance(v, list) and len(v) > 4:
            body = ",\n".join("    " + _compact(r) for r in v)
            lines.append(f"  {_compact(k)}: [\n{body}\n  ]")
        elif isinstance(v, dict) and len(_compact(v)) > 100:
            body = ",\n".join(f"    {_compact(kk)}: {_compact(v[kk])}" for kk in sorted(v))
            lines.append(f"  {_compact(k)}: {{\n{body}\n  }}")
        else:
            lines.append(f"  {_compact(k)}: {_compact(v)}")
    return "{\n" + ",\n".join(lines) + "\n}\n"


def loads(text: str, where="<string>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{where}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def read_json(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return loads(text, str(path))


# --------------------------------------------------------------- groupoids

def groupoid_to_raw(G: Groupoid, explicit=False) -> dict:
    """Raw JSON form; a Sym groupoid is stored by recipe unless ``explicit`` asks for the full table."""
    if isinstance(G, SymGroupoid) and not explicit:
        out = {"sym": groupoid_to_raw(G.base), "L": G.L}
        if G.weight is not None:
            out["weight"] = list(G.weight)
        return out
    names, objs = G.names, G.objects
    compose = [[names[g], names[f], names[int(G.comp[g, f])]]
               for g in range(G.n_morphisms) for f in range(G.n_morphisms) if G.comp[g, f] >= 0]
    return {
        "kind": "groupoid",
        "objects": list(objs),
        "morphisms": [{"id": names[m], "src": objs[G.src[m]], "tgt": objs[G.tgt[m]]}
                      for m in range(G.n_morphisms)],
        "compose": compose,
        "inverse": [[names[m], names[int(G.inv[m])]] for m in range(G.n_morphisms)],
        "identities": {objs[a]: names[int(G.ident[a])] for a in range(G.n_objects)},
    }


class Resolver:
    """Turns groupoid refs into Groupoid objects, caching by ref."""

    def __init__(self, base_dir=None):
        self.base_dir = Path(base_dir) if base_dir else Path.cwd()
        self._cache = {}

    def groupoid(self, ref) -> Groupoid:
        if isinstance(ref, Groupoid):
            return ref
        if isinstance(ref, dict):
            if "sym" in ref:
                base = self.groupoid(ref["sym"])
                return build_sym(base, int(ref["L"]), ref.get("weight"))
            if ref.get("kind", "groupoid") != "groupoid":
                raise ParseError(f"expected a groupoid, found kind {ref.get('kind')!r}")
            return validate_groupoid(ref)
        if not isinstance(ref, str):
            raise ParseError(f"bad groupoid reference {ref!r}")
        if ref in self._cache:
            return self._cache[ref]
        m = _SYM_REF.match(ref)
        if m:
            G = build_sym(self.groupoid(m.group(1).strip()), int(m.group(2)))
        else:
            G = self.groupoid(self._load_ref(ref))
        self._cache[ref] = G
        return G

    def _load_ref(self, ref):
        for cand in (self.base_dir / ref, Path(ref), FIXTURE_DIR / ref, FIXTURE_DIR / f"{ref}.json"):
            if cand.is_file():
                return read_json(cand)
        raise ParseError(f"cannot resolve groupoid reference {ref!r}")


def parse_groupoid(raw, resolver=None) -> Groupoid:
    return (resolver or Resolver()).groupoid(raw)


# ------------------------------------------------------------ object/morphism names

def _obj_name(G, a):
    if isinstance(G, SymGroupoid):
        return json.dumps([G.base.objects[x] for x in G.seqs[a]], ensure_ascii=False)
    return G.objects[a]


def _obj_id(G, name):
    if isinstance(G, SymGroupoid):
        seq = json.loads(name) if isinstance(name, str) else name
        return G.obj_id(tuple(G.base.obj(x) for x in seq))
    return G.obj(name)


def _mor_name(G, m):
    if isinstance(G, SymGroupoid):
        return [list(G.perms[m]), [G.base.names[x] for x in G.parts[m]]]
    return G.names[m]


def _mor_id(G, x):
    if isinstance(G, SymGroupoid):
        perm, parts = x
        return G.mor_id(perm, [G.base.mor(p) for p in parts])
    return G.mor(x)


# ------------------------------------------------------------------ kits

def kit_to_raw(K: Kit) -> dict:
    G = K.base
    fam = {}
    for a in range(G.n_objects):
        subs = sorted(K.family[a], key=lambda H: H.key())
        fam[_obj_name(G, a)] = [[_mor_name(G, m) for m in H.sorted()] for H in subs]
    return {"kind": "kit", "groupoid": groupoid_to_raw(G), "family": fam}


def parse_kit(raw, resolver=None) -> Kit:
    resolver = resolver or Resolver()
    try:
        G = resolver.groupoid(raw["groupoid"])
        fam = raw["family"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"kit description missing field {exc}") from None
    if isinstance(G, SymGroupoid):
        fam = {_obj_id(G, o): [[G.names[_mor_id(G, x)] for x in ids] for ids in groups]
               for o, groups in fam.items()}
    return validate_kit(G, fam)


# ------------------------------------------------------------ profunctors

def profunctor_to_raw(P: Profunctor) -> dict:
    A, B = P.source, P.target
    elems = {}
    for (b, a), ps in sorted(P.cells().items()):
        elems[f"{_obj_name(B, b)}|{_obj_name(A, a)}"] = [P.names[p] for p in ps]
    left = [[_mor_name(A, al), P.names[p], P.names[int(P.left[al, p])]]
            for al in range(A.n_morphisms) for p in range(len(P)) if P.left[al, p] >= 0]
    right = [[P.names[p], _mor_name(B, be), P.names[int(P.right[p, be])]]
             for p in range(len(P)) for be in range(B.n_morphisms) if P.right[p, be] >= 0]
    return {"kind": "profunctor", "source": groupoid_to_raw(A), "target": groupoid_to_raw(B),
            "elems": elems, "left": left, "right": right}


def parse_profunctor(raw, resolver=None) -> Profunctor:
    import numpy as np
    resolver = resolver or Resolver()
    try:
        A = resolver.groupoid(raw["source"])
        B = resolver.groupoid(raw["target"])
        elems, lrows, rrows = raw["elems"], raw["left"], raw["right"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"profunctor description missing field {exc}") from None
    names, cb, ca = [], [], []
    for key, ids in elems.items():
        if "|" not in key:
            raise ParseError(f"cell key {key!r} is not of the form 'b|a'")
        bs, as_ = key.split("|", 1)
        b, a = _obj_id(B, bs), _obj_id(A, as_)
        for x in ids:
            names.append(str(x))
            cb.append(b)
            ca.append(a)
    order = sorted(range(len(names)), key=lambda i: (cb[i], ca[i], i))
    names = [names[i] for i in order]
    cb = [cb[i] for i in order]
    ca = [ca[i] for i in order]
    idx = {n: i for i, n in enumerate(names)}
    if len(idx) != len(names):
        raise ParseError("duplicate element ids")

    def eid(x):
        try:
            return idx[str(x)]
        except KeyError:
            raise ParseError(f"unknown element id {x!r}") from None

    left = np.full((A.n_morphisms, len(names)), -1, dtype=np.int64)
    right = np.full((len(names), B.n_morphisms), -1, dtype=np.int64)
    for al, p, q in lrows:
        left[_mor_id(A, al), eid(p)] = eid(q)
    for p, be, q in rrows:
        right[eid(p), _mor_id(B, be)] = eid(q)
    P = Profunctor(A, B, cb, ca, left, right, names)
    missing_l = (left < 0) & (np.asarray(A.src)[:, None] == np.asarray(ca)[None, :])
    missing_r = (right < 0) & (np.asarray(cb)[:, None] == np.asarray(B.tgt)[None, :])
    if missing_l.any() or missing_r.any():
        raise ParseError("action table is incomplete")
    return P.validate()


# -------------------------------------------------------------- presheaves

def presheaf_to_raw(X: Presheaf) -> dict:
    G = X.base
    sections = {_obj_name(G, a): [X.names[x] for x in X.section(a)] for a in range(G.n_objects)}
    action = [[X.names[x], _mor_name(G, al), X.names[int(X.act[x, al])]]
              for x in range(len(X)) for al in range(G.n_morphisms) if X.act[x, al] >= 0]
    return {"kind": "presheaf", "groupoid": groupoid_to_raw(G), "sections": sections, "action": action}


def parse_presheaf(raw, resolver=None) -> Presheaf:
    import numpy as np
    resolver = resolver or Resolver()
    try:
        G = resolver.groupoid(raw["groupoid"])
        secs, rows = raw["sections"], raw["action"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"presheaf description missing field {exc}") from None
    pairs = sorted(((_obj_id(G, o), str(x)) for o, xs in secs.items() for x in xs), key=lambda t: t[0])
    names = [x for _, x in pairs]
    idx = {n: i for i, n in enumerate(names)}
    if len(idx) != len(names):
        raise ParseError("duplicate element ids")
    act = np.full((len(names), G.n_morphisms), -1, dtype=np.int64)
    for x, al, y in rows:
        try:
            act[idx[str(x)], _mor_id(G, al)] = idx[str(y)]
        except KeyError as exc:
            raise ParseError(f"unknown element id {exc}") from None
    obj = np.array([a for a, _ in pairs], dtype=np.int64)
    if len(obj) and ((act < 0) & (obj[:, None] == np.asarray(G.tgt)[None, :])).any():
        raise ParseError("action table is incomplete")
    return Presheaf(G, obj, act, names).validate()


# ------------------------------------------------------------------ dispatch

WRITERS = {Kit: kit_to_raw, Profunctor: profunctor_to_raw, Presheaf: presheaf_to_raw, Groupoid: groupoid_to_raw}


def to_raw(obj) -> dict:
    for cls, fn in WRITERS.items():
        if isinstance(obj, cls):
            return fn(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def parse_any(raw, resolver=None):
    """Dispatch on "kind" (species files are profunctors out of a Sym groupoid)."""
    kind = raw.get("kind") if isinstance(raw, dict) else None
    parsers = {"groupoid": parse_groupoid, "kit": parse_kit, "profunctor": parse_profunctor,
               "species": parse_profunctor, "presheaf": parse_presheaf}
    if kind not in parsers:
        raise ParseError(f"unknown or missing kind {kind!r}")
    return parsers[kind](raw, resolver)


def load(path):
    """Read and validate any supported file; refs resolve relative to the file's directory."""
    path = Path(path)
    if not path.is_file() and (FIXTURE_DIR / f"{path}.json").is_file():
        path = FIXTURE_DIR / f"{path}.json"
    return parse_any(read_json(path), Resolver(path.parent))


def save(obj, path):
    Path(path).write_text(dumps(to_raw(obj)), encoding="utf-8")


def same_named(P, Q) -> bool:
    """Equality of two profunctors or presheaves after matching elements by name."""
    import numpy as np
    if type(P) is not type(Q) or len(P) != len(Q) or sorted(P.names) != sorted(Q.names):
        return False
    pos = {n: i for i, n in enumerate(Q.names)}
    f = np.array([pos[n] for n in P.names], dtype=np.int64)
    if isinstance(P, Presheaf):
        return (P.base == Q.base and np.array_equal(Q.obj[f], P.obj)
                and np.array_equal(np.where(P.act >= 0, f[np.maximum(P.act, 0)], -1), Q.act[f]))
    from .profunctor import is_equivariant_bijection
    return P.source == Q.source and P.target == Q.target and is_equivariant_bijection(P, Q, f)
