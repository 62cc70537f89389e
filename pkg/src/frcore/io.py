"""Vendored data files: model parameters, level tables and atomic constants.

Model and atom files are plain key-value text::

    # comment
    kind = model
    alpha_d = 20.38 bohr^3

    [l=0]
    alpha1 = 4.29673059 bohr^-1

Every dimensioned value carries its unit and the unit is checked against the
schema, so a value in the wrong unit is rejected instead of silently used.
Level files are CSV records ``n, l, j, energy_cm-1, source`` with ``j`` either
a fraction such as ``3/2`` or ``avg``.
"""

import os
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .potentials import (
    CorePolarizationParams,
    GaussianTerm,
    KlapischChannel,
    ModelPotentialParams,
    ParameterError,
    PseudoPotentialParams,
)

DATA_ENV = "FRCORE_DATA_DIR"
L_LETTERS = "spdfghi"


class ParseError(ValueError):
    def __init__(self, path, line, message):
        where = f"{path}:{line}" if line else str(path)
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


class ValidationError(ValueError):
    def __init__(self, path, key, message):
        super().__init__(f"{path}: {key}: {message}")
        self.path = path
        self.key = key


def data_dir():
    env = os.environ.get(DATA_ENV)
    if env:
        return Path(env)
    return Path(__file__).resolve().parent / "data"


def resolve_data_path(name, suffixes=(".txt", ".csv")):
    """Return ``name`` if it is an existing file, else look it up in the data dir."""
    p = Path(name)
    if p.is_file():
        return p
    base = data_dir()
    for cand in [base / name] + [base / (str(name) + s) for s in suffixes]:
        if cand.is_file():
            return cand
    raise FileNotFoundError(f"data file not found: {name} (searched . and {base})")


# ---------------------------------------------------------------------------
# key-value documents


@dataclass
class Entry:
    key: str
    value: str
    line: int


def _read_sections(path):
    path = Path(path)
    text = path.read_text()
    sections = {"": []}
    order = [""]
    current = ""
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"\[([^\]]+)\]", line)
        if m:
            current = m.group(1).strip()
            if current in sections:
                raise ParseError(path, lineno, f"duplicate section [{current}]")
            sections[current] = []
            order.append(current)
            continue
        if "=" not in line:
            raise ParseError(path, lineno, f"expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParseError(path, lineno, "empty key")
        sections[current].append(Entry(key, value, lineno))
    return [(name, sections[name]) for name in order]


def _quantity(path, entry, unit):
    parts = entry.value.split()
    if unit is None:
        if len(parts) != 1:
            raise ParseError(path, entry.line, f"{entry.key}: expected a bare value")
        text = parts[0]
    else:
        if len(parts) != 2:
            raise ParseError(path, entry.line, f"{entry.key}: expected '<value> {unit}'")
        text, got = parts
        if got != unit:
            raise ParseError(path, entry.line, f"{entry.key}: unit {got!r}, expected {unit!r}")
    try:
        return float(text)
    except ValueError:
        raise ParseError(path, entry.line, f"{entry.key}: not a number: {text!r}") from None


def _int(path, entry):
    try:
        return int(entry.value)
    except ValueError:
        raise ParseError(path, entry.line, f"{entry.key}: not an integer: {entry.value!r}") from None


def _collect(path, section, entries, schema, repeatable=()):
    """Map keys to entries, rejecting unknown and duplicated keys."""
    found = {}
    for e in entries:
        if e.key not in schema and e.key not in repeatable:
            raise ParseError(path, e.line, f"unknown key {e.key!r} in [{section}]")
        if e.key in repeatable:
            found.setdefault(e.key, []).append(e)
        elif e.key in found:
            raise ParseError(path, e.line, f"duplicate key {e.key!r}")
        else:
            found[e.key] = e
    return found


def _require(path, section, found, key):
    if key not in found:
        where = f"[{section}] " if section else ""
        raise ValidationError(path, key, f"missing required key {where}{key}")
    return found[key]


def _channel_index(path, name):
    m = re.fullmatch(r"l=(\d+)", name)
    return int(m.group(1)) if m else None


MODEL_TOP = {"kind": None, "atom": None, "Z": None, "alpha_d": "bohr^3"}
MODEL_CHANNEL = {"alpha1": "bohr^-1", "alpha2": "bohr^-1", "alpha3": "bohr^-1", "rc": "bohr"}
PSEUDO_TOP = {"kind": None, "atom": None}
PSEUDO_CHANNEL = {"lowest_n": None}
CPP_KEYS = {"label": None, "alpha_d": "bohr^3"}
CPP_RHO = {f"rho_{c}": "bohr" for c in L_LETTERS}


def parse_model_file(path):
    """Parse a model file.

    Returns :class:`ModelPotentialParams` for ``kind = model`` and a tuple
    ``(PseudoPotentialParams, CorePolarizationParams or None)`` for
    ``kind = pseudo``.
    """
    path = resolve_data_path(path)
    sections = _read_sections(path)
    top = {e.key: e for e in sections[0][1]}
    kind_entry = top.get("kind")
    if kind_entry is None:
        raise ValidationError(path, "kind", "missing required key kind")
    kind = kind_entry.value
    try:
        if kind == "model":
            return _parse_model(path, sections)
        if kind == "pseudo":
            return _parse_pseudo(path, sections)
    except ParameterError as err:
        raise ValidationError(path, "parameters", str(err)) from err
    raise ParseError(path, kind_entry.line, f"unknown kind {kind!r}")


def _channels(path, sections, allowed_extra=()):
    chans = {}
    for name, entries in sections[1:]:
        idx = _channel_index(path, name)
        if idx is None:
            if name in allowed_extra:
                continue
            line = entries[0].line if entries else None
            raise ParseError(path, line, f"unknown section [{name}]")
        chans[idx] = (name, entries)
    if not chans or sorted(chans) != list(range(len(chans))):
        raise ValidationError(path, "l", f"channels must be l=0..L without gaps, got {sorted(chans)}")
    return [chans[i] for i in range(len(chans))]


def _parse_model(path, sections):
    top = _collect(path, "", sections[0][1], MODEL_TOP)
    Z = _int(path, _require(path, "", top, "Z"))
    alpha_d = _quantity(path, _require(path, "", top, "alpha_d"), "bohr^3")
    atom = _require(path, "", top, "atom").value
    channels = []
    for name, entries in _channels(path, sections):
        found = _collect(path, name, entries, MODEL_CHANNEL)
        vals = {k: _quantity(path, _require(path, name, found, k), u) for k, u in MODEL_CHANNEL.items()}
        channels.append(KlapischChannel(**vals))
    return ModelPotentialParams(Z, alpha_d, tuple(channels), atom)


def _parse_gaussian(path, entry):
    fields = [f.strip() for f in entry.value.split(";")]
    if len(fields) != 3:
        raise ParseError(path, entry.line, "gaussian: expected 'C unit ; n ; a unit'")
    c = _quantity(path, Entry("gaussian coefficient", fields[0], entry.line), "hartree*bohr^-n")
    n = _int(path, Entry("gaussian power", fields[1], entry.line))
    a = _quantity(path, Entry("gaussian exponent", fields[2], entry.line), "bohr^-2")
    return GaussianTerm(c, n, a)


def _parse_pseudo(path, sections):
    top = _collect(path, "", sections[0][1], PSEUDO_TOP)
    atom = _require(path, "", top, "atom").value
    channels, lowest = [], []
    for name, entries in _channels(path, sections, allowed_extra=("cpp",)):
        found = _collect(path, name, entries, PSEUDO_CHANNEL, repeatable=("gaussian",))
        lowest.append(_int(path, _require(path, name, found, "lowest_n")))
        channels.append(tuple(_parse_gaussian(path, e) for e in found.get("gaussian", [])))
    pp = PseudoPotentialParams(tuple(channels), tuple(lowest), atom)
    cpp = None
    for name, entries in sections[1:]:
        if name != "cpp":
            continue
        found = _collect(path, name, entries, {**CPP_KEYS, **CPP_RHO})
        alpha_d = _quantity(path, _require(path, name, found, "alpha_d"), "bohr^3")
        label = found["label"].value if "label" in found else ""
        rhos = []
        for ell in range(len(channels)):
            key = f"rho_{L_LETTERS[ell]}"
            rhos.append(_quantity(path, _require(path, name, found, key), "bohr"))
        extra = [k for k in found if k.startswith("rho_") and L_LETTERS.index(k[4]) >= len(channels)]
        for k in sorted(extra, key=lambda k: L_LETTERS.index(k[4])):
            rhos.append(_quantity(path, found[k], "bohr"))
        cpp = CorePolarizationParams(alpha_d, tuple(rhos), label)
    return pp, cpp


def _fmt(x):
    return repr(float(x))


def serialize_model(model, cpp=None, header=""):
    """Inverse of :func:`parse_model_file`."""
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    if isinstance(model, ModelPotentialParams):
        lines += ["kind = model", f"atom = {model.atom}", f"Z = {model.Z}",
                  f"alpha_d = {_fmt(model.alpha_d)} bohr^3"]
        for ell, c in enumerate(model.channels):
            lines += ["", f"[l={ell}]"]
            lines += [f"alpha1 = {_fmt(c.alpha1)} bohr^-1", f"alpha2 = {_fmt(c.alpha2)} bohr^-1",
                      f"alpha3 = {_fmt(c.alpha3)} bohr^-1", f"rc = {_fmt(c.rc)} bohr"]
        return "\n".join(lines) + "\n"
    pp = model
    lines += ["kind = pseudo", f"atom = {pp.atom}"]
    for ell, terms in enumerate(pp.channels):
        lines += ["", f"[l={ell}]", f"lowest_n = {pp.first_n(ell)}"]
        for t in terms:
            lines.append(f"gaussian = {_fmt(t.coefficient)} hartree*bohr^-n ; {t.power} ; {_fmt(t.exponent)} bohr^-2")
    if cpp is not None:
        lines += ["", "[cpp]"]
        if cpp.label:
            lines.append(f"label = {cpp.label}")
        lines.append(f"alpha_d = {_fmt(cpp.alpha_d)} bohr^3")
        for ell, rho in enumerate(cpp.cutoffs):
            lines.append(f"rho_{L_LETTERS[ell]} = {_fmt(rho)} bohr")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# atomic constants

ATOM_SCHEMA = {
    "fine_splitting": "cm^-1",
    "C6": "au",
    "d2_wavelength": "nm",
    "d2_lifetime": "ns",
    "mass": "u",
    "ionization_energy": "cm^-1",
    "core_polarizability": "bohr^3",
}


def parse_atom_data(path="atoms"):
    """Atomic constants keyed by atom label; each value is a dict in file units."""
    path = resolve_data_path(path)
    out = {}
    for name, entries in _read_sections(path)[1:]:
        found = _collect(path, name, entries, ATOM_SCHEMA)
        out[name] = {k: _quantity(path, _require(path, name, found, k), u) for k, u in ATOM_SCHEMA.items()}
    return out


def serialize_atom_data(atoms):
    lines = []
    for name, rec in atoms.items():
        lines += [f"[{name}]"] + [f"{k} = {_fmt(rec[k])} {u}" for k, u in ATOM_SCHEMA.items()] + [""]
    return "\n".join(lines)


def find_atom(atoms, label):
    for name in atoms:
        if name.lower() == label.lower():
            return name, atoms[name]
    raise KeyError(f"unknown atom {label!r}; available: {', '.join(atoms)}")


# ---------------------------------------------------------------------------
# level tables


def parse_j(text):
    text = text.strip()
    if text.lower() in ("avg", "none", ""):
        return None
    return float(Fraction(text))


def format_j(j):
    if j is None:
        return "avg"
    return str(Fraction(j).limit_denominator(2))


def parse_levels(path):
    """Read an experimental level file into a list of ``ExperimentalLevel``."""
    from .fitting import ExperimentalLevel

    path = resolve_data_path(path)
    levels = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 5:
            raise ParseError(path, lineno, f"expected 5 comma-separated fields, got {len(fields)}")
        try:
            n, ell = int(fields[0]), int(fields[1])
            j = parse_j(fields[2])
            energy = float(fields[3])
        except ValueError as err:
            raise ParseError(path, lineno, str(err)) from None
        try:
            levels.append(ExperimentalLevel(n, ell, j, energy, fields[4]))
        except ValueError as err:
            raise ValidationError(path, f"line {lineno}", str(err)) from None
    return levels


def serialize_levels(levels):
    rows = ["# n, l, j, energy_cm-1, source"]
    rows += [f"{lv.n},{lv.ell},{format_j(lv.j)},{lv.energy!r},{lv.source_tag}" for lv in levels]
    return "\n".join(rows) + "\n"


def level_label(n, ell, j):
    base = f"{n}{L_LETTERS[ell]}"
    if j is None or ell == 0:
        return base
    return base + ("+" if j > ell else "-")
