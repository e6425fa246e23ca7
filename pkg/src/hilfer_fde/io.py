"""Problem files and result serialization.

A problem file is sectioned key-value text::

    # D^{0.7,0} y - D^{0.5,0} y = 0
    [equation]
    term = 0.7, 0, 1        # order, type, coefficient; first line is the leading term
    term = 0.5, 0, -1
    [initial]
    iv.0.0 = 1.0            # iv.<term>.<k> = d^k I^{gamma_term} y (0+)
    [forcing]
    kind = zero             # zero | power | exp | sin | table
    [domain]
    end = 1.0

Coefficients are those of the left-hand side, sum_i c_i D^{alpha_i,beta_i} y = g.
"""
import csv
import io as _io
import json
import math

import numpy as np

from .exceptions import FdeError
from .forcing import Exponential, Power, Sinusoid, Tabulated, Zero
from .fracops import SampledFunction
from .problem import FdeProblem, FractionalTerm


class ParseError(FdeError, ValueError):
    def __init__(self, message, line=None, key=None):
        where = []
        if key is not None:
            where.append(f"key '{key}'")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.key = key


_SECTIONS = ("equation", "initial", "forcing", "domain")
_FORCING_KEYS = {
    "zero": (),
    "power": ("scale", "exponent"),
    "exp": ("scale", "rate"),
    "sin": ("scale", "freq", "phase"),
    "table": ("step", "values", "order"),
}


def _number(text, line, key):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"expected a number, got '{text}'", line, key) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite number '{text}'", line, key)
    return value


def _numbers(text, line, key):
    return [_number(part.strip(), line, key) for part in text.split(",")]


def parse_problem(text):
    """Parse problem-file text into an FdeProblem."""
    section = None
    terms = []
    initial = {}
    forcing = {}
    forcing_lines = {}
    domain = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"malformed section header '{line}'", lineno)
            section = line[1:-1].strip().lower()
            if section not in _SECTIONS:
                raise ParseError(f"unknown section '{section}'", lineno)
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if section is None:
            raise ParseError("entry before any section header", lineno, key)
        if section == "equation":
            if key != "term":
                raise ParseError("only 'term' entries are allowed in [equation]", lineno, key)
            parts = _numbers(value, lineno, key)
            if len(parts) != 3:
                raise ParseError("term needs 'order, type, coefficient'", lineno, key)
            try:
                terms.append(FractionalTerm(*parts))
            except FdeError as exc:
                raise ParseError(str(exc), lineno, key) from None
        elif section == "initial":
            bits = key.split(".")
            if len(bits) != 3 or bits[0] != "iv" or not (bits[1].isdigit() and bits[2].isdigit()):
                raise ParseError("initial values are written iv.<term>.<k>", lineno, key)
            pair = (int(bits[1]), int(bits[2]))
            if pair in initial:
                raise ParseError("duplicate initial value", lineno, key)
            initial[pair] = _number(value, lineno, key)
        elif section == "forcing":
            if key in forcing:
                raise ParseError("duplicate forcing entry", lineno, key)
            forcing[key] = value
            forcing_lines[key] = lineno
        else:
            if key != "end":
                raise ParseError("only 'end' is allowed in [domain]", lineno, key)
            domain[key] = _number(value, lineno, key)
    if not terms:
        raise ParseError("no [equation] terms", key="term")
    for i, k in initial:
        if i > len(terms) - 1:
            raise ParseError(f"term index {i} out of range", key=f"iv.{i}.{k}")
    lower = tuple(FractionalTerm(t.order, t.type_param, -t.coefficient) for t in terms[1:])
    try:
        return FdeProblem(terms[0], lower, initial, _forcing(forcing, forcing_lines),
                          domain.get("end", 1.0))
    except ParseError:
        raise
    except FdeError as exc:
        raise ParseError(str(exc)) from None


def _forcing(entries, lines):
    kind = entries.get("kind", "zero")
    if kind not in _FORCING_KEYS:
        raise ParseError(f"unknown forcing kind '{kind}'", lines.get("kind"), "kind")
    for key in entries:
        if key != "kind" and key not in _FORCING_KEYS[kind]:
            raise ParseError(f"unexpected parameter for '{kind}' forcing", lines[key], key)

    def num(key, default):
        if key not in entries:
            return default
        return _number(entries[key], lines[key], key)

    try:
        if kind == "zero":
            return Zero()
        if kind == "power":
            return Power(num("scale", 1.0), num("exponent", 0.0))
        if kind == "exp":
            return Exponential(num("scale", 1.0), num("rate", 1.0))
        if kind == "sin":
            return Sinusoid(num("scale", 1.0), num("freq", 1.0), num("phase", 0.0))
        if "values" not in entries or "step" not in entries:
            raise ParseError("table forcing needs 'step' and 'values'", lines.get("kind"), "values")
        values = _numbers(entries["values"], lines["values"], "values")
        return Tabulated(SampledFunction(num("step", None), values), int(num("order", 1)))
    except ParseError:
        raise
    except FdeError as exc:
        raise ParseError(str(exc), lines.get("kind"), "kind") from None


def read_problem(path):
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())


def format_problem(problem):
    """Inverse of parse_problem (left-hand-side coefficients)."""
    out = ["[equation]"]
    out.append(f"term = {problem.leading.order!r}, {problem.leading.type_param!r}, {problem.leading.coefficient!r}")
    for t in problem.lower:
        out.append(f"term = {t.order!r}, {t.type_param!r}, {-t.coefficient!r}")
    if problem.initial_values:
        out.append("[initial]")
        for (i, k), v in sorted(problem.initial_values.items()):
            out.append(f"iv.{i}.{k} = {v!r}")
    g = problem.forcing
    out.append("[forcing]")
    out.append(f"kind = {g.kind}")
    if isinstance(g, Power):
        out += [f"scale = {g.scale!r}", f"exponent = {g.exponent!r}"]
    elif isinstance(g, Exponential):
        out += [f"scale = {g.scale!r}", f"rate = {g.rate!r}"]
    elif isinstance(g, Sinusoid):
        out += [f"scale = {g.scale!r}", f"freq = {g.angular_freq!r}", f"phase = {g.phase!r}"]
    elif isinstance(g, Tabulated):
        out += [f"step = {g.samples.step!r}", f"order = {g.order}",
                "values = " + ", ".join(repr(float(v)) for v in g.samples.values)]
    out += ["[domain]", f"end = {problem.interval_end!r}"]
    return "\n".join(out) + "\n"


def samples_to_csv(samples):
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y"])
    for x, y in zip(samples.x, samples.values):
        writer.writerow([f"{x:.17g}", f"{y:.17g}"])
    return buf.getvalue()


def write_csv(samples, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(samples_to_csv(samples))


def read_csv(path):
    """Read an x,y CSV back into a SampledFunction (uniform grid assumed)."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    x = np.atleast_1d(data["x"])
    if x.size < 3:
        raise ParseError("CSV needs at least 3 rows", key="x")
    step = (x[-1] - x[0]) / (x.size - 1)
    return SampledFunction(step, np.atleast_1d(data["y"]), start=float(x[0]))


def dumps(obj):
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
