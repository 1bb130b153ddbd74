# app/io/certificates.py
# Certificate files (embedding, blue clique, partition) and the decomposition family/trace files.
from __future__ import annotations

from pathlib import Path
from typing import Sequence, Union

from app.decomp.decompose import DecompositionFamily, TraceStep
from app.embed.embedding import CubeEmbedding
from app.errors import CertificateFormatError, InputError
from app.graph.coloured import Colour, VertexSet
from app.graph.search import CliqueWitness

Certificate = Union[CubeEmbedding, CliqueWitness, list[VertexSet]]

KINDS = ("embedding", "blue-clique", "partition")


def _indices(S: VertexSet) -> str:
    return " ".join(str(v) for v in S.members())


def _parse_indices(text: str, where: str) -> VertexSet:
    if text == "":
        return VertexSet()
    items = text.split(" ")
    if not all(x.isdigit() and (x == "0" or x[0] != "0") for x in items):
        raise CertificateFormatError(f"{where}: expected space-separated vertex indices")
    values = [int(x) for x in items]
    if any(b <= a for a, b in zip(values, values[1:])):
        raise CertificateFormatError(f"{where}: indices must be strictly increasing")
    return VertexSet.of(values)


# -------- certificates --------
def format_certificate(cert: Certificate) -> str:
    if isinstance(cert, CubeEmbedding):
        if cert.n < 1:
            raise InputError("embedding certificates need n >= 1", n=cert.n)
        lines = ["embedding"] + [
            f"cube {format(x, f'0{cert.n}b')} -> {v}" for x, v in enumerate(cert.images)
        ]
    elif isinstance(cert, CliqueWitness):
        if cert.colour is not Colour.BLUE:
            raise InputError("only blue cliques are certificates")
        lines = ["blue-clique", _indices(cert.members)]
    else:
        lines = ["partition"] + [f"S{j}: {_indices(S)}".rstrip() for j, S in enumerate(cert)]
    return "\n".join(lines) + "\n"


def parse_certificate(text: str) -> Certificate:
    """Inverse of format_certificate; anything it would not have written is rejected."""
    if not text.endswith("\n"):
        raise CertificateFormatError("missing trailing newline")
    lines = text[:-1].split("\n")
    kind, body = lines[0], lines[1:]
    if kind not in KINDS:
        raise CertificateFormatError(f"unknown certificate kind {kind!r}", kinds=list(KINDS))
    if kind == "embedding":
        count = len(body)
        n = count.bit_length() - 1
        if n < 1 or count != 1 << n:
            raise CertificateFormatError(f"embedding needs 2^n lines, got {count}")
        images = []
        for x, line in enumerate(body):
            prefix = f"cube {format(x, f'0{n}b')} -> "
            value = line[len(prefix):]
            if not line.startswith(prefix) or not value.isdigit() or (len(value) > 1 and value[0] == "0"):
                raise CertificateFormatError(f"line {x + 2}: expected {prefix!r}<vertex>", line=x + 2)
            images.append(int(value))
        return CubeEmbedding(n, tuple(images))
    if kind == "blue-clique":
        if len(body) != 1 or not body[0]:
            raise CertificateFormatError("blue-clique needs exactly one line of indices")
        return CliqueWitness(_parse_indices(body[0], "blue-clique"), Colour.BLUE)
    parts = []
    for j, line in enumerate(body):
        label = f"S{j}:"
        if line == label:
            parts.append(VertexSet())
            continue
        if not line.startswith(label + " "):
            raise CertificateFormatError(f"expected a line starting with {label!r}", line=j + 2)
        parts.append(_parse_indices(line[len(label) + 1:], label))
    if not parts:
        raise CertificateFormatError("partition needs at least one class")
    return parts


def load_certificate(path: str | Path) -> Certificate:
    try:
        return parse_certificate(Path(path).read_text(encoding="ascii"))
    except UnicodeDecodeError as exc:
        raise CertificateFormatError(f"{path}: file is not ASCII") from exc
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def save_certificate(cert: Certificate, path: str | Path) -> None:
    Path(path).write_text(format_certificate(cert), encoding="ascii", newline="\n")


# -------- decomposition output --------
def format_family(family: DecompositionFamily) -> str:
    lines = ["family", f"level {family.level}"]
    lines += [f"U{j}: {_indices(U)}".rstrip() for j, U in enumerate(family.sets, start=1)]
    return "\n".join(lines) + "\n"


def parse_family(text: str) -> DecompositionFamily:
    """Inverse of format_family; exactly one trailing newline."""
    if not text.endswith("\n"):
        raise CertificateFormatError("missing trailing newline")
    lines = text[:-1].split("\n")
    if len(lines) < 2 or lines[0] != "family" or not lines[1].startswith("level "):
        raise CertificateFormatError("family file needs 'family' and 'level <i>' lines")
    level = lines[1][len("level "):]
    if not level.isdigit():
        raise CertificateFormatError(f"bad level {level!r}")
    sets = []
    for j, line in enumerate(lines[2:], start=1):
        label = f"U{j}:"
        if line == label:
            sets.append(VertexSet())
        elif line.startswith(label + " "):
            sets.append(_parse_indices(line[len(label) + 1:], label))
        else:
            raise CertificateFormatError(f"expected a line starting with {label!r}")
    return DecompositionFamily(int(level), tuple(sets))


def format_trace(trace: Sequence[TraceStep]) -> str:
    return "".join(step.line() + "\n" for step in trace)
