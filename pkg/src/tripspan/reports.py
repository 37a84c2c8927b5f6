"""Report builders behind the CLI commands.

Each builder returns a :class:`Report`: a JSON-ready document, optional CSV
rows, an optional figure callback, and the exit code the command should use.
Serialisation happens here, single-threaded, with sorted keys so that equal
inputs always give equal bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from tripspan import figures
from tripspan.compression import verify_compression
from tripspan.config import RunConfig
from tripspan.errors import PatternNotFound
from tripspan.extremal import g_exact, g_table, h_interval, h_max, verify_claims
from tripspan.groups import (GroupSpec, TripleSystem, full_system, lower_bound_system,
                             min_span_brute, random_dense, spanned_elements,
                             verify_lower_bound)
from tripspan.lattice import (edge_boundary, extremal_uniqueness, g_of_set, hexagon_ball,
                              min_boundary_brute, spiral_family, symmetry_classes,
                              to_json_list)
from tripspan.witness import (PipelineConfig, comb_subspace_find, cube_from_system,
                              grid_pattern_search, recheck_witness, witness_pipeline,
                              witness_to_json)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_FOUND = 2
EXIT_BUDGET = 3
EXIT_COUNTEREXAMPLE = 4


@dataclass
class Report:
    doc: dict
    header: tuple = ()
    rows: list = field(default_factory=list)
    figure: Callable | None = None
    exit_code: int = EXIT_OK

    def to_json(self) -> str:
        return json.dumps(self.doc, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        if not self.header:
            raise ValueError("this report has no tabular form")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        writer.writerows(self.rows)
        return buf.getvalue()

    def emit(self, fmt: str, out: str | None, stdout=None) -> None:
        """Write the report in ``fmt``; SVG goes to ``out`` with the table next to it."""
        stdout = stdout or sys.stdout
        if fmt == "svg":
            if self.figure is None:
                raise ValueError("this report has no figure")
            if not out:
                raise ValueError("--format svg needs --out")
            path = Path(out)
            path.parent.mkdir(parents=True, exist_ok=True)
            self.figure(path)
            path.with_suffix(".json").write_text(self.to_json())
            if self.header:
                path.with_suffix(".csv").write_text(self.to_csv())
            stdout.write(self.to_json())
            return
        text = self.to_csv() if fmt == "csv" else self.to_json()
        if out:
            Path(out).parent.mkdir(parents=True, exist_ok=True)
            Path(out).write_text(text)
        else:
            stdout.write(text)


def announce(count, what: str) -> None:
    print(f"search space: {count} {what}", file=sys.stderr)


def _ratio(x: float) -> float:
    return round(x, 6)


# ---------------------------------------------------------------------------
# extremal functions


def report_g(ks: range) -> Report:
    if len(ks) == 0:
        raise ValueError("empty k range")
    gs = g_table(ks[-1])
    rows = [(k, gs[k - 1], _ratio(gs[k - 1] / math.sqrt(12 * k))) for k in ks]
    doc = {"rows": [{"k": k, "g": g, "ratio": r} for k, g, r in rows]}
    return Report(doc, ("k", "g", "ratio"), rows,
                  figure=lambda p: figures.plot_g_ratio(rows, p))


def report_h(ms: range | None = None, triple: tuple | None = None) -> Report:
    if triple is not None:
        a, b, ell = triple
        value = h_interval(a, b, ell)
        return Report({"a": a, "b": b, "ell": ell, "h": value},
                      ("a", "b", "ell", "h"), [(a, b, ell, value)])
    if ms is None or len(ms) == 0:
        raise ValueError("empty m range")
    rows = []
    for m in ms:
        rec = h_max(m)
        rows.append((m, rec.h_value, rec.argmax.a, rec.argmax.b, rec.argmax.ell))
    doc = {"rows": [dict(zip(("m", "h", "a", "b", "ell"), r)) for r in rows]}
    return Report(doc, ("m", "h", "a", "b", "ell"), rows)


# ---------------------------------------------------------------------------
# isoperimetry


def report_isoperimetry(ks: range, mode: str, cfg: RunConfig) -> Report:
    if len(ks) == 0:
        raise ValueError("empty k range")
    R = cfg.window_radius
    if mode == "spiral":
        seq = spiral_family(ks[-1])
        rows = []
        for k in ks:
            pre = seq[:k]
            rows.append((k, edge_boundary(pre), g_of_set(pre), 2 * g_exact(k)))
        doc = {"mode": mode, "points": to_json_list(seq), "order": [list(p) for p in seq],
               "rows": [dict(zip(("k", "boundary", "g", "two_g_k"), r)) for r in rows]}
        fig_rows = [{"k": r[0], "boundary": r[1]} for r in rows]

        def fig(path):
            if len(rows) > 1:
                figures.plot_boundaries(fig_rows, path)
            else:
                figures.plot_point_set(seq, path)
        return Report(doc, ("k", "boundary", "g", "two_g_k"), rows, figure=fig)

    window = len(hexagon_ball(R))
    if mode == "brute":
        rows, sets = [], []
        for k in ks:
            announce(math.comb(window, k), f"{k}-subsets of a {window}-point window")
            res = min_boundary_brute(k, R, node_budget=cfg.node_budget, workers=cfg.worker_count)
            rows.append((k, res.minimum, len(res.witnesses)))
            sets.append(min(res.witnesses, key=lambda s: sorted(s)))
        doc = {"mode": mode, "window_radius": R,
               "rows": [dict(zip(("k", "minimum", "witnesses"), r)) for r in rows]}
        return Report(doc, ("k", "minimum", "witnesses"), rows,
                      figure=lambda p: figures.plot_point_sets(sets, p, "boundary minimisers"))
    if mode == "uniqueness":
        k = ks[-1]
        announce(math.comb(window, k), f"{k}-subsets of a {window}-point window")
        sets = extremal_uniqueness(k, R, node_budget=cfg.node_budget, workers=cfg.worker_count)
        classes = symmetry_classes(sets)
        doc = {"mode": mode, "k": k, "window_radius": R,
               "minimum": edge_boundary(sets[0]),
               "count": len(sets), "symmetry_classes": len(classes),
               "sets": [to_json_list(s) for s in sets]}
        rows = [(k, len(sets), len(classes))]
        return Report(doc, ("k", "count", "symmetry_classes"), rows,
                      figure=lambda p: figures.plot_point_sets(sets, p, f"k = {k} minimisers"))
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# groups and witnesses


def load_system(spec: GroupSpec, path: str | None = None, density=None,
                seed: int = 0) -> TripleSystem:
    if path:
        doc = json.loads(Path(path).read_text())
        S = TripleSystem.from_json(doc)
        if S.spec != spec:
            raise ValueError("system file is over a different group than --group")
        return S
    if density is not None and float(density) < 1:
        return random_dense(spec, density, seed)
    return full_system(spec)


def report_witness(S: TripleSystem, k: int, variant: str, cfg: RunConfig,
                   subgroup: tuple | None = None, recheck: bool = False) -> Report:
    pc = PipelineConfig(subgroup=subgroup, node_budget=cfg.node_budget, workers=cfg.worker_count)
    try:
        res = witness_pipeline(S, k, variant, pc)
    except PatternNotFound as exc:
        return Report({"status": "pattern-not-found", "k": k, "variant": variant,
                       "group": S.spec.to_json(), "reason": str(exc)},
                      exit_code=EXIT_NOT_FOUND)
    doc = witness_to_json(res)
    if recheck:
        doc["recheck"] = recheck_witness(doc, S)
    doc["status"] = "ok"
    f = S.spec.element_from_json
    pts = [(f(a), f(b)) for a, b in res.certificate["pairs"]]
    row = (S.spec.describe(), variant, k, doc["size_total"], res.certificate["span_count"])
    return Report(doc, ("group", "variant", "k", "size_total", "span"), [row],
                  figure=lambda p: figures.plot_point_set(pts, p, "certificate pairs (a, b)"))


def report_lowerbound(n: int, k: int, cfg: RunConfig) -> Report:
    S = lower_bound_system(n)
    announce(math.comb(S.size, k), f"{k}-subsets of {S.size} pairs")
    ms = min_span_brute(S, k, node_budget=cfg.node_budget)
    g = g_exact(k)
    doc = {"n": n, "k": k, "pairs": S.size, "min_span": ms.size, "g": g,
           "attained_by": [list(p) for p in ms.pairs], "tight": ms.size == g}
    pts = [(a, b) for a, b in ms.pairs]
    return Report(doc, ("n", "k", "pairs", "min_span", "g"), [(n, k, S.size, ms.size, g)],
                  figure=lambda p: figures.plot_point_set(pts, p, f"{k} pairs spanning {ms.size}"))


def report_pattern(spec: GroupSpec, h: int, density, seed: int, cfg: RunConfig,
                   width: int | None = None) -> Report:
    """Search a random dense set for a homothetic grid (cyclic) or a subspace (power)."""
    if spec.kind == "cyclic":
        n = spec.order
        rng = np.random.default_rng(seed)
        M = rng.random((n, n)) < float(density)
        announce(n * n * max(1, (n - 1) // h), "grid anchors x steps")
        pat = grid_pattern_search(M, h, width=width, workers=cfg.worker_count,
                                  node_budget=cfg.node_budget)
        base = {"group": spec.to_json(), "h": h, "density": float(density), "seed": seed}
        if pat is None:
            return Report({**base, "status": "pattern-not-found"}, exit_code=EXIT_NOT_FOUND)
        pts = pat.points()
        doc = {**base, "status": "ok", "s": list(pat.s), "t": pat.t, "width": pat.width,
               "points": [list(p) for p in pts]}
        return Report(doc, ("s1", "s2", "t", "h", "width"),
                      [(pat.s[0], pat.s[1], pat.t, h, pat.width)],
                      figure=lambda p: figures.plot_point_set(pts, p, f"{h} x {pat.width} grid"))
    if spec.kind == "power":
        S = random_dense(spec, density, seed) if float(density) < 1 else full_system(spec)
        announce(spec.order ** 2, "cube cells")
        part = comb_subspace_find(cube_from_system(S), spec.q, spec.m, h,
                                  node_budget=cfg.node_budget)
        base = {"group": spec.to_json(), "d": h, "density": float(density), "seed": seed}
        if part is None:
            return Report({**base, "status": "pattern-not-found"}, exit_code=EXIT_NOT_FOUND)
        return Report({**base, "status": "ok", "partition": part.to_json()})
    raise ValueError("pattern search needs a cyclic or power group")


# ---------------------------------------------------------------------------
# verification suites


def suite_compression(cfg: RunConfig, max_coord=7, max_size=4, max_ell=6) -> Report:
    anchored = sum(math.comb(max_coord - 1, s - 1) for s in range(1, max_size + 1))
    announce(anchored * anchored * (max_ell + 1), "(A, B, ell) instances")
    res = verify_compression(max_coord, max_size, max_ell, node_budget=cfg.node_budget,
                             workers=cfg.worker_count)
    res["suite"] = "compression"
    res["passed"] = not res["counterexamples"]
    return Report(res, exit_code=EXIT_OK if res["passed"] else EXIT_COUNTEREXAMPLE)


def suite_lowerbound(cfg: RunConfig, n=64, k=3, samples=1000) -> Report:
    S = lower_bound_system(n)
    announce(math.comb(S.size, k), f"{k}-subsets of {S.size} pairs")
    tight = verify_lower_bound(n, k, node_budget=cfg.node_budget)
    mismatches = correspondence_mismatches(S, samples, cfg.seed)
    doc = {"suite": "lowerbound", "n": n, "k": k, "pairs": S.size, "g": g_exact(k),
           "every_subset_spans_g": tight, "correspondence_samples": samples,
           "correspondence_mismatches": mismatches}
    doc["passed"] = tight and not mismatches
    return Report(doc, exit_code=EXIT_OK if doc["passed"] else EXIT_COUNTEREXAMPLE)


def correspondence_mismatches(S: TripleSystem, samples: int, seed: int) -> list:
    """Random pair subsets where |spanned elements| differs from g of the point set.

    Pairs (a, b) of the lower-bound system become planar points; distinct
    a, b and a + b values are rows, columns and anti-diagonals.
    """
    rng = np.random.default_rng(seed)
    pairs = S.pairs
    bad = []
    for _ in range(samples):
        size = int(rng.integers(1, min(len(pairs), 30) + 1))
        idx = rng.choice(len(pairs), size=size, replace=False)
        chosen = [pairs[i] for i in sorted(idx)]
        if len(spanned_elements(S, chosen)) != g_of_set(chosen):
            bad.append([list(p) for p in chosen])
    return bad


def suite_claims(cfg: RunConfig, m_max=300, sym_max=40, k_max=10_000) -> Report:
    announce(m_max * m_max // 2, "h splits")
    res = verify_claims(m_max, sym_max, k_max)
    res["suite"] = "claims"
    res["passed"] = not res["failures"]
    return Report(res, exit_code=EXIT_OK if res["passed"] else EXIT_COUNTEREXAMPLE)


SUITES = {
    "compression": suite_compression,
    "lowerbound": suite_lowerbound,
    "claims": suite_claims,
}


def parse_range(text: str) -> range:
    """``"5"`` or ``"1..12"`` (inclusive) as a range; empty ranges are errors."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        r = range(int(lo), int(hi) + 1)
    else:
        v = int(text)
        r = range(v, v + 1)
    if len(r) == 0:
        raise ValueError(f"empty range {text!r}")
    return r


def parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(";", ",").split(",") if x.strip())

