"""Experiment configuration parsing and deterministic CSV/JSON output.

Configs are a single JSON document.  All text outputs are deterministic for a
fixed config: CSV uses 17-significant-digit floats, '.' decimal separator,
',' field separator and '\\n' line endings; JSON is written with sorted keys;
files are written atomically (temp file + rename).
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .catalog import RepCatalog
from .fourier import FourierCoefficients
from .groups import GroupModel
from .hilbert import (
    ExpansionWeights,
    L2Function,
    OrthonormalFamily,
    diag_reciprocal_weights,
    random_function,
    unit_weights,
)
from .parseval import MatrixSequence, MembershipVerdict
from .semicomplete import SemicompletenessReport, validate_weights


class ConfigError(ValueError):
    """Malformed configuration or unreadable referenced path (CLI exit 2)."""


class InvariantBreach(RuntimeError):
    """A numerical invariant (Gram, Bessel) failed at runtime (CLI exit 3)."""


_MAX_SEED = 2**64 - 1


@dataclass
class IwasawaConfig:
    k_spec: str = "circle:64"
    a_range: tuple[float, float] = (-2.0, 2.0)
    n_range: tuple[float, float] = (-2.0, 2.0)
    a_size: int = 32
    n_size: int = 32
    profile: str = "uniform"
    truncation: float | None = None


@dataclass
class ExperimentConfig:
    name: str
    group_spec: str
    truncation: float | None = None
    omit: tuple[str, ...] = ()
    weights_spec: str = "unit"
    test_set_spec: object = "random:count=16,seed=0"
    epsilon: float | None = None
    tol: float | None = None
    out_dir: Path = Path(".")
    dump_coefficients: bool = False
    iwasawa: IwasawaConfig | None = None
    seed_override: int | None = None


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ConfigError(message)


def _parse_kv(rest: str, what: str) -> dict[str, str]:
    out = {}
    for part in filter(None, (p.strip() for p in rest.split(","))):
        key, sep, val = part.partition("=")
        _require(bool(sep), f"malformed {what} parameter {part!r}")
        out[key.strip().lower()] = val.strip()
    return out


def load_config(
    path: str | Path,
    out_override: str | None = None,
    seed_override: int | None = None,
    tol_override: float | None = None,
) -> ExperimentConfig:
    path = Path(path)
    _require(path.is_file(), f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _require(isinstance(raw, dict), "config must be a JSON object")

    name = raw.get("name", path.stem)
    _require(isinstance(name, str) and name != "", "config 'name' must be a nonempty string")
    group_spec = raw.get("group")
    _require(isinstance(group_spec, str), "config needs a 'group' spec string")

    omit = raw.get("omit", [])
    _require(
        isinstance(omit, list) and all(isinstance(k, str) for k in omit),
        "config 'omit' must be a list of label strings",
    )
    seed = raw.get("seed", None)
    if seed_override is not None:
        seed = seed_override
    if seed is not None:
        _require(
            isinstance(seed, int) and 0 <= seed <= _MAX_SEED,
            "seed must be an unsigned 64-bit integer",
        )

    tol = tol_override if tol_override is not None else raw.get("tol")
    if tol is not None:
        _require(isinstance(tol, (int, float)) and tol > 0, "'tol' must be positive")
    epsilon = raw.get("epsilon")
    if epsilon is not None:
        _require(
            isinstance(epsilon, (int, float)) and epsilon > 0, "'epsilon' must be positive"
        )

    iwa = None
    if "iwasawa" in raw:
        blk = raw["iwasawa"]
        _require(isinstance(blk, dict), "'iwasawa' must be an object")
        try:
            a_blk = blk.get("A", {})
            n_blk = blk.get("N", {})
            iwa = IwasawaConfig(
                k_spec=blk.get("K", "circle:64"),
                a_range=tuple(a_blk.get("range", (-2.0, 2.0))),
                n_range=tuple(n_blk.get("range", (-2.0, 2.0))),
                a_size=int(a_blk.get("nodes", 32)),
                n_size=int(n_blk.get("nodes", 32)),
                profile=blk.get("profile", "uniform"),
                truncation=blk.get("truncation"),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"malformed iwasawa block: {exc}") from exc
        _require(len(iwa.a_range) == 2 and len(iwa.n_range) == 2, "ranges need two endpoints")

    out_dir = Path(out_override) if out_override is not None else Path(raw.get("out", "."))
    return ExperimentConfig(
        name=name,
        group_spec=group_spec,
        truncation=raw.get("truncation"),
        omit=tuple(omit),
        weights_spec=raw.get("weights", "unit"),
        test_set_spec=raw.get("test_set", "random:count=16,seed=0"),
        epsilon=epsilon,
        tol=tol,
        out_dir=out_dir,
        dump_coefficients=bool(raw.get("dump_coefficients", False)),
        iwasawa=iwa,
        seed_override=seed_override,
    )


# ---------------------------------------------------------------------------
# weights / function / test-set specs


def build_weights(spec, n: int, seed_override: int | None = None) -> ExpansionWeights:
    """Parse a weights spec: 'unit' | 'diag-reciprocal:seed=S' | 'table:PATH'."""
    if isinstance(spec, ExpansionWeights):
        return spec
    _require(isinstance(spec, str), f"weights spec must be a string, got {type(spec)}")
    head, _, rest = spec.strip().partition(":")
    head = head.lower()
    if head == "unit":
        return unit_weights(n)
    if head == "diag-reciprocal":
        params = _parse_kv(rest, "weights")
        try:
            seed = int(params.get("seed", "0"))
        except ValueError as exc:
            raise ConfigError(f"bad weights seed {params.get('seed')!r}") from exc
        if seed_override is not None:
            seed = seed_override
        return diag_reciprocal_weights(n, seed)
    if head == "table":
        path = Path(rest)
        _require(path.is_file(), f"weights table not found: {path}")
        try:
            data = json.loads(path.read_text())
            gamma = _complex_array(data["gamma"])
            beta = _complex_array(data["beta"])
        except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
            raise ConfigError(f"malformed weights table {path}: {exc}") from exc
        _require(
            gamma.ndim == 1 and beta.shape == (len(gamma), len(gamma)),
            "weights table needs gamma (n,) and beta (n, n)",
        )
        _require(len(gamma) >= n, f"weights table dimension {len(gamma)} < required {n}")
        return ExpansionWeights(gamma, beta)
    raise ConfigError(f"unknown weights spec {spec!r}")


def _complex_array(obj) -> np.ndarray:
    def conv(x):
        if isinstance(x, (int, float)):
            return complex(x)
        if isinstance(x, list) and len(x) == 2:
            return complex(x[0], x[1])
        raise ValueError(f"cannot read complex value from {x!r}")

    arr = np.asarray(obj, dtype=object)
    return np.array(
        [conv(v) for v in arr.reshape(-1)], dtype=np.complex128
    ).reshape(arr.shape)


def build_function(
    spec: str, group: GroupModel, family: OrthonormalFamily | None = None
) -> tuple[str, L2Function]:
    """Parse a single-function spec.

    Forms: 'random:seed=S', 'member:block=B,i=I,j=J' (B is a block index or
    label), 'samples:PATH' (CSV with node,re,im rows).
    """
    head, _, rest = spec.strip().partition(":")
    head = head.lower()
    if head == "random":
        params = _parse_kv(rest, "function")
        try:
            seed = int(params.get("seed", "0"))
        except ValueError as exc:
            raise ConfigError(f"bad function seed {params.get('seed')!r}") from exc
        return f"random:{seed}", random_function(group, seed)
    if head == "member":
        _require(family is not None, "member function spec needs a family in context")
        params = _parse_kv(rest, "function")
        try:
            i = int(params["i"])
            j = int(params["j"])
            blk = params["block"]
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"malformed member spec {spec!r}") from exc
        block_index = None
        if blk.isdigit():
            block_index = int(blk)
        else:
            for bi, b in enumerate(family.blocks):
                if b.label == blk:
                    block_index = bi
                    break
        _require(
            block_index is not None and 0 <= block_index < len(family.blocks),
            f"unknown block {blk!r}",
        )
        b = family.blocks[block_index]
        _require(0 <= i < b.size and 0 <= j < b.size, f"member index out of range in {spec!r}")
        return f"member:{b.label}[{i}][{j}]", family.member(block_index, i, j)
    if head == "samples":
        return f"samples:{rest}", l2_from_csv(group, rest)
    raise ConfigError(f"unknown function spec {spec!r}")


def build_test_set(
    spec,
    group: GroupModel,
    family: OrthonormalFamily | None = None,
    seed_override: int | None = None,
) -> tuple[list[str], list[L2Function], str]:
    """Parse a test-set spec into (ids, functions, descriptor).

    Forms: 'random:count=N,seed=S', 'members', 'samples:PATH' (CSV with
    fn,node,re,im rows), or a JSON list of single-function specs.
    """
    if isinstance(spec, list):
        ids, fns = [], []
        for s in spec:
            fid, f = build_function(s, group, family)
            ids.append(fid)
            fns.append(f)
        return ids, fns, f"list:{len(spec)}"
    _require(isinstance(spec, str), f"test_set spec must be a string or list, got {type(spec)}")
    head, _, rest = spec.strip().partition(":")
    head = head.lower()
    if head == "random":
        params = _parse_kv(rest, "test set")
        try:
            count = int(params.get("count", "16"))
            seed = int(params.get("seed", "0"))
        except ValueError as exc:
            raise ConfigError(f"malformed test set spec {spec!r}") from exc
        _require(count >= 0, "test set count must be nonnegative")
        if seed_override is not None:
            seed = seed_override
        rng = np.random.default_rng(seed)
        ids, fns = [], []
        for k in range(count):
            v = rng.standard_normal(group.n_nodes) + 1j * rng.standard_normal(group.n_nodes)
            f = L2Function(group, v)
            nrm = f.norm()
            if nrm > 0:
                f = f * (1.0 / nrm)
            ids.append(f"random:{k}")
            fns.append(f)
        return ids, fns, f"random:count={count},seed={seed}"
    if head == "members":
        _require(family is not None, "'members' test set needs a family in context")
        ids, fns = [], []
        for bi, b in enumerate(family.blocks):
            for i in range(b.size):
                for j in range(b.size):
                    ids.append(f"member:{b.label}[{i}][{j}]")
                    fns.append(family.member(bi, i, j))
        return ids, fns, "members"
    if head == "samples":
        path = Path(rest)
        _require(path.is_file(), f"samples file not found: {path}")
        ids, fns = functions_from_csv(group, path)
        return ids, fns, f"samples:{rest}"
    raise ConfigError(f"unknown test set spec {spec!r}")


# ---------------------------------------------------------------------------
# deterministic writers


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    if isinstance(x, (np.floating,)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path: str | Path, header: list[str], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(x) for x in row) for row in rows)
    lines.append("")
    _atomic_write(path, "\n".join(lines))


def write_json(path: str | Path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# serialization of domain objects


def catalog_json_obj(cat: RepCatalog) -> dict:
    return {
        "group": cat.group.name,
        "labels": [
            {"label": lab.key, "degree": lab.degree, "magnitude": lab.magnitude}
            for lab in cat.labels
        ],
    }


def coefficient_grid_rows(cat: RepCatalog, label_key: str):
    """CSV rows (node, i, j, re, im) for one label's cached coefficient grid."""
    grid = cat.grids[label_key]
    n, d, _ = grid.shape
    for k in range(n):
        for i in range(d):
            for j in range(d):
                z = grid[k, i, j]
                yield (k, i, j, float(z.real), float(z.imag))


def l2_to_csv(f: L2Function, path: str | Path) -> None:
    write_csv(
        path,
        ["node", "re", "im"],
        ((k, float(z.real), float(z.imag)) for k, z in enumerate(f.values)),
    )


def l2_from_csv(group: GroupModel, path: str | Path) -> L2Function:
    path = Path(path)
    _require(path.is_file(), f"function file not found: {path}")
    values = np.zeros(group.n_nodes, dtype=np.complex128)
    seen = 0
    for row in _read_csv_rows(path, 3):
        k = int(row[0])
        _require(0 <= k < group.n_nodes, f"node index {k} out of range in {path}")
        values[k] = float(row[1]) + 1j * float(row[2])
        seen += 1
    _require(seen == group.n_nodes, f"{path} has {seen} rows, expected {group.n_nodes}")
    return L2Function(group, values)


def functions_to_csv(ids: list[str], fns: list[L2Function], path: str | Path) -> None:
    def rows():
        for fid, f in zip(ids, fns):
            for k, z in enumerate(f.values):
                yield (fid, k, float(z.real), float(z.imag))

    write_csv(path, ["fn", "node", "re", "im"], rows())


def functions_from_csv(group: GroupModel, path: str | Path) -> tuple[list[str], list[L2Function]]:
    by_id: dict[str, np.ndarray] = {}
    counts: dict[str, int] = {}
    for row in _read_csv_rows(Path(path), 4):
        fid = row[0]
        if fid not in by_id:
            by_id[fid] = np.zeros(group.n_nodes, dtype=np.complex128)
            counts[fid] = 0
        k = int(row[1])
        _require(0 <= k < group.n_nodes, f"node index {k} out of range in {path}")
        by_id[fid][k] = float(row[2]) + 1j * float(row[3])
        counts[fid] += 1
    for fid, c in counts.items():
        _require(c == group.n_nodes, f"function {fid!r} has {c} rows, expected {group.n_nodes}")
    ids = list(by_id)
    return ids, [L2Function(group, by_id[fid]) for fid in ids]


def _read_csv_rows(path: Path, n_cols: int):
    with open(path, newline="") as fh:
        first = True
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if first:
                first = False
                try:
                    float(parts[-1])
                except ValueError:
                    continue  # header row
            _require(len(parts) == n_cols, f"{path}: expected {n_cols} columns, got {len(parts)}")
            yield parts


def matrix_sequence_rows(seq: MatrixSequence):
    for key in seq.labels:
        mat = seq.matrices[key]
        for i in range(mat.shape[0]):
            for j in range(mat.shape[1]):
                z = mat[i, j]
                yield (key, i, j, float(z.real), float(z.imag))


def matrix_sequence_summary(seq: MatrixSequence) -> dict:
    """Per-block and total Hilbert-Schmidt norms of a matrix sequence."""
    blocks = []
    for key in seq.labels:
        mat = seq.matrices[key]
        blocks.append(
            {
                "label": key,
                "size": mat.shape[0],
                "norm_sq": float(np.sum(np.abs(mat) ** 2)),
            }
        )
    return {"norm_sq": seq.norm_sq(), "blocks": blocks}


def lifted_family_to_csv(lifted, path: str | Path) -> None:
    """Export lifted members over the K x AN product grid (member,node,re,im)."""
    ids = []
    for b in lifted.blocks:
        for i in range(b.size):
            for j in range(b.size):
                ids.append(f"member:{b.label}[{i}][{j}]")

    def rows():
        for fid, values in zip(ids, lifted.members):
            for k, z in enumerate(values):
                yield (fid, k, float(z.real), float(z.imag))

    write_csv(path, ["member", "node", "re", "im"], rows())


def fourier_rows(fhat: FourierCoefficients):
    for lab in fhat.catalog.labels:
        mat = fhat.matrices[lab.key]
        for i in range(lab.degree):
            for j in range(lab.degree):
                z = mat[i, j]
                yield (lab.key, i, j, float(z.real), float(z.imag))


def weights_hash(weights: ExpansionWeights) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(weights.gamma).tobytes())
    h.update(np.ascontiguousarray(weights.beta).tobytes())
    return h.hexdigest()


def report_json_obj(report: SemicompletenessReport) -> dict:
    diag = validate_weights(report.weights)
    return {
        "epsilon": report.epsilon,
        "weights_hash": weights_hash(report.weights),
        "per_function": [
            {"fn": fid, "defect": defect} for fid, defect in report.per_function
        ],
        "max_defect": report.max_defect,
        "test_set": report.test_set,
        "within_epsilon": report.within_epsilon,
        "weight_diagnostic": {
            "diagonal_violations": [
                {"index": i, "residual": r} for i, r in diag.diagonal_violations
            ],
            "zero_gamma": list(diag.zero_gamma),
            "zero_beta": [list(ij) for ij in diag.zero_beta],
            "admissible": diag.admissible,
        },
    }


def verdict_json_obj(v: MembershipVerdict) -> dict:
    return {
        "defect": v.defect,
        "tolerance": v.tolerance,
        "verdict": "member" if v.member else "non-member",
        "span_dimension": v.span_dimension,
        "norm_sq": v.norm_sq,
    }
