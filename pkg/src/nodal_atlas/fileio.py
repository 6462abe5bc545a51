"""Coefficient files, CSV/PGM writers and run summaries.

Coefficient file layout (text, UTF-8)::

    maassform v1
    t = 13.779751351883144
    parity = even
    norm = l2
    rho1_scaled = 0.93344413444939301
    data
    1 1
    2 1.5493044792289046
    ...

Header lines are ``key = value``; ``rho1_scaled`` is required for norm
``l2`` and optional for ``raw``. The body lists ``n lambda(n)`` for
strictly increasing n starting at 1; the writer emits every n, and a
reader fills any gaps from the prime values by Hecke multiplicativity.
Lines starting with '#' are comments. Floats are written with 17
significant digits, which round-trips binary64.
"""
from __future__ import annotations

import hashlib
import io
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .coeffs import HeckeData, extend_hecke
from .errors import FormatError, IncompleteSeedError
from .waveform import MaassForm, normalize_l2

FORMAT_TAG = "maassform v1"
TOOL_VERSION = "nodal_atlas 0.1.0"


def fmt(x: float) -> str:
    return "%.17g" % float(x)


def dump_coefficients(form, norm: str | None = None) -> str:
    data = form.coeffs if isinstance(form, MaassForm) else form
    if norm is None:
        norm = "l2" if data.rho1_scaled is not None else "raw"
    if norm not in ("l2", "raw"):
        raise FormatError("norm must be 'l2' or 'raw'")
    if norm == "l2" and data.rho1_scaled is None:
        raise FormatError("norm l2 needs rho1_scaled")
    out = io.StringIO()
    out.write(FORMAT_TAG + "\n")
    out.write(f"t = {fmt(data.t)}\n")
    out.write(f"parity = {data.parity}\n")
    out.write(f"norm = {norm}\n")
    if data.rho1_scaled is not None:
        out.write(f"rho1_scaled = {fmt(data.rho1_scaled)}\n")
    out.write("data\n")
    for n in range(1, data.max_n + 1):
        out.write(f"{n} {fmt(data.lam[n])}\n")
    return out.getvalue()


def write_coefficients(path, form, norm: str | None = None) -> None:
    Path(path).write_text(dump_coefficients(form, norm))


def parse_coefficients(text: str) -> HeckeData:
    lines = text.splitlines()
    pos = 0

    def nxt():
        nonlocal pos
        while pos < len(lines):
            line = lines[pos].strip()
            pos += 1
            if line and not line.startswith("#"):
                return line
        return None

    tag = nxt()
    if tag != FORMAT_TAG:
        raise FormatError(f"line {pos}: expected format tag {FORMAT_TAG!r}, got {tag!r}")
    header = {}
    while True:
        line = nxt()
        if line is None:
            raise FormatError("missing 'data' line")
        if line == "data":
            break
        if "=" not in line:
            raise FormatError(f"line {pos}: malformed header line {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        header[key] = val
    for key in ("t", "parity", "norm"):
        if key not in header:
            raise FormatError(f"header is missing {key!r}")
    try:
        t = float(header["t"])
    except ValueError as exc:
        raise FormatError(f"bad t value {header['t']!r}") from exc
    if header["parity"] not in ("even", "odd"):
        raise FormatError(f"bad parity {header['parity']!r}")
    norm = header["norm"]
    if norm not in ("l2", "raw"):
        raise FormatError(f"bad norm mode {norm!r}")
    rho1 = None
    if "rho1_scaled" in header:
        try:
            rho1 = float(header["rho1_scaled"])
        except ValueError as exc:
            raise FormatError("bad rho1_scaled value") from exc
    if norm == "l2" and rho1 is None:
        raise FormatError("norm l2 requires rho1_scaled")
    if norm == "raw":
        rho1 = None
    lam = [np.nan]
    while True:
        line = nxt()
        if line is None:
            break
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {pos}: expected 'n lambda(n)', got {line!r}")
        try:
            n, v = int(parts[0]), float(parts[1])
        except ValueError as exc:
            raise FormatError(f"line {pos}: unparsable entry {line!r}") from exc
        if n < len(lam):
            raise FormatError(f"line {pos}: index {n} is not increasing")
        if len(lam) == 1 and n != 1:
            raise FormatError(f"line {pos}: the first entry must be n = 1")
        lam.extend([np.nan] * (n - len(lam)))
        lam.append(v)
    if len(lam) < 2:
        raise FormatError("no coefficients in file")
    if lam[1] != 1.0:
        raise FormatError("lambda(1) must be 1")
    data = HeckeData(t, header["parity"], np.array(lam), rho1)
    if data.max_n < data.lam.size - 1:
        try:
            ext = extend_hecke(data, data.lam.size - 1)
        except IncompleteSeedError as exc:
            raise FormatError(f"gap in coefficients needs lambda({exc.prime}), which is missing") from exc
        data = data.with_lambda(np.where(np.isnan(data.lam), ext.lam, data.lam))
    return data


def read_coefficients(path) -> HeckeData:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    return parse_coefficients(text)


_NORMALISED = {}


def load_form(path, normalize: bool = True) -> MaassForm:
    """MaassForm from a coefficient file.

    Files in raw norm with t <= 50 are L2-normalised on load; the result is
    cached in memory by file content, so repeated loads are cheap.
    """
    data = read_coefficients(path)
    if data.rho1_scaled is not None or not normalize or data.t > 50:
        return MaassForm(data)
    key = hashlib.sha256(Path(path).read_bytes()).hexdigest()
    if key not in _NORMALISED:
        _NORMALISED[key] = normalize_l2(MaassForm(data)).coeffs.rho1_scaled
    return MaassForm(data.with_rho1(_NORMALISED[key]))


# ---------------------------------------------------------------- outputs
def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row) + "\n")


def write_pgm(path, labels: np.ndarray) -> None:
    """Binary PGM (P5), one byte per cell: label mod 255, 0 for unlabeled cells.

    Row 0 of the image is the top of the domain (largest y).
    """
    lab = np.asarray(labels)
    img = np.where(lab > 0, (lab - 1) % 255 + 1, 0).astype(np.uint8)[::-1]
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


@dataclass
class RunSummary:
    """Key=value summary of a CLI run.

    `text()` leaves out the wall time so that summaries are byte-identical
    across runs and thread counts; the CLI reports timing on stderr.
    """

    command: str
    inputs: dict = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    results: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)  # (name, passed, detail)
    wall_time: float = 0.0

    def _fmt(self, v):
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, (float, np.floating)):
            return fmt(v)
        return str(v)

    def text(self) -> str:
        out = [f"tool={TOOL_VERSION}", f"command={self.command}"]
        for k, v in self.inputs.items():
            out.append(f"input.{k}={self._fmt(v)}")
        for k, v in self.parameters.items():
            out.append(f"param.{k}={self._fmt(v)}")
        for k, v in self.results.items():
            out.append(f"result.{k}={self._fmt(v)}")
        for name, ok, detail in self.checks:
            out.append(f"check.{name}={'pass' if ok else 'FAIL'}" + (f" {detail}" if detail else ""))
        return "\n".join(out) + "\n"

    @property
    def ok(self) -> bool:
        return all(c[1] for c in self.checks)


def input_digest(path) -> str:
    h = hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]
    return f"{os.path.basename(str(path))}:{h}"
