"""JSON and CSV persistence for catalogs, solution specs, residual sweeps and two-radii reports.

Every document carries ``schema``, ``version`` and the ``config`` that
produced it.  Floats are written with ``repr`` precision (17 significant
digits) and files are replaced atomically.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .chareq import CharacteristicFn, EquationParams
from .meanvalue import ResidualReport
from .synthesis import PolyCoef, SolutionSpec, WaveCoef
from .tworadii import CommonZero, Regime, TwoRadiiReport
from .zeroscan import Zero, ZeroCatalog, strip_height

SCHEMA = 1
CSV_COLUMNS = ("z_re", "z_im", "res_re", "res_im", "abs_res", "quad_err")


class SchemaError(ValueError):
    """A document does not match the expected layout."""


def atomic_write(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=False, allow_nan=False) + "\n"


def _envelope(kind: str, config: dict | None) -> dict:
    return {"schema": SCHEMA, "kind": kind, "version": __version__, "config": dict(config or {})}


def _check_schema(doc: dict) -> None:
    if doc.get("schema") != SCHEMA:
        raise SchemaError(f"unsupported schema {doc.get('schema')!r}")


# -- zero catalog --------------------------------------------------------------

def catalog_to_dict(catalog: ZeroCatalog, config: dict | None = None) -> dict:
    doc = _envelope("zero_catalog", config)
    doc.update({
        "m": catalog.m,
        "s": catalog.s,
        "lambda_max": float(catalog.lambda_max),
        "origin_multiplicity": catalog.origin_multiplicity,
        "zeros": [
            {"re": float(z.lam.real), "im": float(z.lam.imag), "mult": z.multiplicity,
             "abs_g": float(z.abs_g), "abs_gprime": float(z.abs_gprime),
             "isolation_radius": float(z.isolation_radius)}
            for z in catalog.zeros
        ],
    })
    return doc


def catalog_from_dict(doc: dict) -> ZeroCatalog:
    _check_schema(doc)
    try:
        zeros = tuple(
            Zero(complex(z["re"], z["im"]), int(z["mult"]), int(z["mult"]), float(z["abs_g"]),
                 float(z["abs_gprime"]), float(z["isolation_radius"]))
            for z in doc["zeros"]
        )
        m, s, lam_max = int(doc["m"]), int(doc["s"]), float(doc["lambda_max"])
        origin = int(doc["origin_multiplicity"])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed zero catalog: {exc}") from exc
    return ZeroCatalog(m, s, lam_max, strip_height(CharacteristicFn(m, s), lam_max), zeros, origin)


# -- solution spec ----------------------------------------------------------------

def spec_to_dict(spec: SolutionSpec, config: dict | None = None) -> dict:
    p = spec.params
    doc = _envelope("solution_spec", config)
    doc.update({
        "m": p.m, "s": p.s, "r": float(p.r), "K": spec.K,
        "alpha": float(spec.alpha), "C": float(spec.C),
        "a": [{"k": t.k, "p": t.p, "re": complex(t.value).real, "im": complex(t.value).imag}
              for t in spec.a],
        "b": [{"k": t.k, "p": t.p, "re": complex(t.value).real, "im": complex(t.value).imag}
              for t in spec.b],
        "c": [{"lambda_re": complex(t.lam).real, "lambda_im": complex(t.lam).imag, "eta": t.eta,
               "k": t.k, "re": complex(t.value).real, "im": complex(t.value).imag}
              for t in spec.c],
    })
    if spec.multiplicities:
        doc["multiplicities"] = [{"lambda_re": lam.real, "lambda_im": lam.imag, "mult": n}
                                 for lam, n in spec.multiplicities.items()]
    return doc


def spec_from_dict(doc: dict) -> SolutionSpec:
    _check_schema(doc)
    try:
        params = EquationParams(int(doc["m"]), int(doc["s"]), float(doc["r"]))
        a = tuple(PolyCoef(int(t["k"]), int(t["p"]), complex(t["re"], t["im"])) for t in doc.get("a", []))
        b = tuple(PolyCoef(int(t["k"]), int(t["p"]), complex(t["re"], t["im"])) for t in doc.get("b", []))
        c = tuple(WaveCoef(complex(t["lambda_re"], t["lambda_im"]), int(t["eta"]), int(t["k"]),
                           complex(t["re"], t["im"])) for t in doc.get("c", []))
        mult = {complex(t["lambda_re"], t["lambda_im"]): int(t["mult"])
                for t in doc.get("multiplicities", [])}
        spec = SolutionSpec(params, int(doc["K"]), a, b, c, float(doc.get("alpha", 4.0)),
                            float(doc.get("C", 1.0)), mult)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed solution spec: {exc}") from exc
    spec.validate()
    return spec


# -- two-radii report ---------------------------------------------------------------

def report_to_dict(report: TwoRadiiReport, config: dict | None = None, contract: dict | None = None) -> dict:
    doc = _envelope("two_radii_report", config)
    doc.update({
        "m": report.m, "s": report.s,
        "r1": report.r1, "r2": report.r2, "R": report.R,
        "regime": report.regime.value,
        "scope": {"lambda_max": report.lambda_max, "tol": report.tol},
        "common_zeros": [
            {"lambda_re": c.lam.real, "lambda_im": c.lam.imag, "w1": c.w1, "w2": c.w2,
             "ratio_defect": c.ratio_defect}
            for c in report.common_zeros
        ],
    })
    if report.counterexample is not None:
        f = report.counterexample
        doc["counterexample"] = {"field": "cylinder", "lambda_re": f.lam.real,
                                 "lambda_im": f.lam.imag, "eta": f.eta, "k": f.k}
        if contract is not None:
            doc["counterexample"]["contract"] = contract
    return doc


def report_from_dict(doc: dict) -> TwoRadiiReport:
    _check_schema(doc)
    from .tworadii import counterexample

    found = tuple(CommonZero(complex(c["lambda_re"], c["lambda_im"]), int(c["w1"]), int(c["w2"]),
                             float(c["ratio_defect"])) for c in doc["common_zeros"])
    example = None
    if "counterexample" in doc:
        ce = doc["counterexample"]
        example = counterexample(complex(ce["lambda_re"], ce["lambda_im"]))
    return TwoRadiiReport(int(doc["m"]), int(doc["s"]), float(doc["r1"]), float(doc["r2"]),
                          float(doc["R"]), found, Regime(doc["regime"]),
                          float(doc["scope"]["lambda_max"]), float(doc["scope"]["tol"]), example)


# -- residual CSV -----------------------------------------------------------------------

def residuals_to_csv(reports: Sequence[ResidualReport], config: dict | None = None) -> str:
    """CSV with one row per center; ``#`` header lines carry schema, version and config."""
    buf = io.StringIO()
    meta = _envelope("residual_sweep", config)
    buf.write(f"# {json.dumps(meta, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rep in reports:
        writer.writerow([repr(float(x)) for x in (
            rep.z.real, rep.z.imag, rep.residual.real, rep.residual.imag,
            abs(rep.residual), rep.quad_error_estimate)])
    return buf.getvalue()


def read_residual_csv(text: str) -> tuple[dict, list[dict[str, float]]]:
    lines = text.splitlines()
    meta: dict[str, Any] = {}
    body = []
    for line in lines:
        if line.startswith("#"):
            meta = json.loads(line[1:])
        else:
            body.append(line)
    rows = [{k: float(v) for k, v in row.items()} for row in csv.DictReader(body)]
    return meta, rows


def write_json(path, doc: dict) -> None:
    atomic_write(path, dumps(doc))


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
