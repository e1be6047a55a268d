"""Experiment drivers: CFI degree growth, WL/degree calibration, CSP sweeps.

Cells run in worker subprocesses with a wall-clock timeout each; a timed-out
cell is recorded as such and the run continues.  Reports are deterministic
given the same inputs and are emitted as CSV plus a JSON mirror (one object
per row, same keys as the CSV columns).
"""

from __future__ import annotations

import csv
import io
import json
import multiprocessing as mp
import os
import time
from typing import Optional

from .algebra import Field, RATIONALS
from .cfi import BASE_LIBRARY, to_graph, twisted_pair
from .encoders import (brute_force_homomorphism, clique_structure, cycle_structure,
                       encode_iso_poly, encode_iso_poly_colored, encode_kconsistency_cnf,
                       k_consistency)
from .errors import UsageError
from .pc import PolySystem, min_refutation_degree, monpc_saturate
from .resolution import kres_refutes
from .wl import ColoredGraph, wl_sweep


def _cell_worker(queue, func, args):
    try:
        for message in func(*args):
            queue.put(message)
        queue.put(("done",))
    except Exception as exc:  # surfaced in the row rather than crashing the run
        queue.put(("error", f"{type(exc).__name__}: {exc}"))


def run_cells(cells: list, timeout_s: float, workers: Optional[int] = None) -> dict:
    """Run (key, generator_func, args) cells in worker processes.

    Each cell yields ("progress", dict) messages and may finish normally;
    the result per key is the merged progress dict plus a status of
    "done", "timeout", or "error".  Results merge deterministically by key.
    """
    workers = workers or min(4, os.cpu_count() or 1)
    results: dict = {}
    pending = list(cells)
    running: list = []
    while pending or running:
        while pending and len(running) < workers:
            key, func, args = pending.pop(0)
            queue: mp.Queue = mp.Queue()
            proc = mp.Process(target=_cell_worker, args=(queue, func, args), daemon=True)
            proc.start()
            running.append((key, proc, queue, time.monotonic(), {}))
        still = []
        for key, proc, queue, started, acc in running:
            while True:
                try:
                    msg = queue.get_nowait()
                except Exception:
                    break
                if msg[0] == "progress":
                    acc.update(msg[1])
                elif msg[0] == "error":
                    acc["status"] = "error"
                    acc["error"] = msg[1]
                elif msg[0] == "done":
                    acc.setdefault("status", "done")
            if not proc.is_alive() and "status" in acc:
                results[key] = acc
            elif not proc.is_alive():
                # drain whatever arrived between the poll and exit
                time.sleep(0.05)
                while True:
                    try:
                        msg = queue.get_nowait()
                    except Exception:
                        break
                    if msg[0] == "progress":
                        acc.update(msg[1])
                    elif msg[0] == "error":
                        acc["status"] = "error"
                        acc["error"] = msg[1]
                    elif msg[0] == "done":
                        acc.setdefault("status", "done")
                acc.setdefault("status", "error")
                results[key] = acc
            elif time.monotonic() - started > timeout_s:
                proc.terminate()
                proc.join()
                acc["status"] = "timeout"
                results[key] = acc
            else:
                still.append((key, proc, queue, started, acc))
        running = still
        if running:
            time.sleep(0.02)
    return results


# --- cell bodies (generators yielding progress messages) ---------------------


def _degree_growth_cell(base_name: str, p: int, field_p: Optional[int], k_max: int,
                        dim_max: int):
    base = BASE_LIBRARY[base_name]
    field = RATIONALS if field_p is None else Field(field_p)
    a, b = twisted_pair(base, p)
    ga, gb = to_graph(a), to_graph(b)
    system = encode_iso_poly_colored(ga, gb, field)
    yield ("progress", {"base": base_name, "base_n": base.n, "p": p,
                        "num_vars": system.num_vars, "min_degree": None,
                        "k_checked": 0, "basis_dims": []})
    dims = []
    for k in range(1, k_max + 1):
        t0 = time.monotonic()
        usable = [ax for ax in system.axioms if ax.degree <= k]
        sub = PolySystem(system.field, system.num_vars, usable)
        res = monpc_saturate(sub, k)
        dims.append(res.basis.dimension)
        yield ("progress", {"k_checked": k, "basis_dims": list(dims),
                            "k_seconds": round(time.monotonic() - t0, 2)})
        if res.refuted:
            yield ("progress", {"min_degree": k})
            break
    t0 = time.monotonic()
    wl_dim = wl_sweep(ga, gb, dim_max)
    yield ("progress", {"wl_dim": wl_dim, "wl_seconds": round(time.monotonic() - t0, 2)})


def _calibration_cell(name: str, g: ColoredGraph, h: ColoredGraph, colored: bool,
                      k_max: int, dim_max: int):
    field = RATIONALS
    if colored:
        system = encode_iso_poly_colored(g, h, field)
    else:
        edges_g = sorted(g.relations.get("E", frozenset()))
        edges_h = sorted(h.relations.get("E", frozenset()))
        system = encode_iso_poly(g.n, edges_g, h.n, edges_h, field)
    yield ("progress", {"pair": name, "num_vars": system.num_vars,
                        "min_degree": None, "k_checked": 0})
    degree = min_refutation_degree(system, "monpc", k_max)
    yield ("progress", {"k_checked": k_max if degree is None else degree,
                        "min_degree": degree})
    wl_dim = wl_sweep(g, h, dim_max)
    yield ("progress", {"wl_dim": wl_dim})


def _csp_cell(n: int, k: int):
    cyc = cycle_structure(n)
    template = clique_structure(2)
    direct = k_consistency(cyc, template, k)
    cnf = encode_kconsistency_cnf(cyc, template, k)
    width = max(len(c) for c in cnf.clauses)
    res_verdict = not kres_refutes(cnf, width)
    brute = brute_force_homomorphism(cyc, template)
    yield ("progress", {"cycle": n, "k": k, "direct": direct,
                        "resolution": res_verdict, "brute_force": brute,
                        "width": width, "agree": direct == res_verdict == brute})


def experiment_degree_growth(bases: list, p: int = 2, field: Field = RATIONALS,
                             k_max: int = 4, dim_max: int = 3,
                             timeout_s: float = 300.0,
                             workers: Optional[int] = None) -> list:
    """Minimal monomial-PC refutation degree of the twisted-pair isomorphism
    system, per base graph, next to the WL distinguishing dimension.

    Rows are sorted by base size; a cell that exceeds the timeout keeps the
    partial degrees it reported (min_degree stays None with k_checked
    showing how far the sweep got).
    """
    for b in bases:
        if b not in BASE_LIBRARY:
            raise UsageError(f"unknown base graph {b!r}; shipped: {sorted(BASE_LIBRARY)}")
    if field.p == p:
        raise UsageError("field characteristic must differ from the CFI prime")
    cells = [(b, _degree_growth_cell, (b, p, field.p, k_max, dim_max)) for b in bases]
    results = run_cells(cells, timeout_s, workers)
    rows = [results[b] for b in sorted(bases, key=lambda b: BASE_LIBRARY[b].n)]
    return rows


def calibration_pairs(include_cfi: bool = True) -> list:
    """The standard calibration corpus: small colored/uncolored pairs with
    known structure plus the CFI/K4 twisted pair."""
    def graph(n, edges, colors=None):
        sym = set()
        for (u, v) in edges:
            sym.add((u, v))
            sym.add((v, u))
        return ColoredGraph(n, colors, {"E": frozenset(sym)})

    pairs = []
    tri2 = graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    c6 = graph(6, [(i, (i + 1) % 6) for i in range(6)])
    pairs.append(("triangles_vs_c6", tri2, c6, False))
    # degree-profile pairs: distinguishable already by color refinement
    pairs.append(("path3_vs_triangle", graph(3, [(0, 1), (1, 2)]),
                  graph(3, [(0, 1), (1, 2), (0, 2)]), False))
    pairs.append(("star_vs_path4", graph(4, [(0, 1), (0, 2), (0, 3)]),
                  graph(4, [(0, 1), (1, 2), (2, 3)]), False))
    pairs.append(("k4_vs_c4", graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
                  graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)]), False))
    pairs.append(("c5_vs_path5", graph(5, [(i, (i + 1) % 5) for i in range(5)]),
                  graph(5, [(i, i + 1) for i in range(4)]), False))
    pairs.append(("matching_vs_path", graph(4, [(0, 1), (2, 3)]),
                  graph(4, [(0, 1), (1, 2)]), False))
    pairs.append(("k33_vs_prism", graph(6, [(i, j + 3) for i in range(3) for j in range(3)]),
                  graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]), False))
    pairs.append(("c4_vs_2k2", graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
                  graph(4, [(0, 1), (2, 3)]), False))
    pairs.append(("p5_vs_star5", graph(5, [(i, i + 1) for i in range(4)]),
                  graph(5, [(0, i) for i in range(1, 5)]), False))
    pairs.append(("triangle_iso_vs_p4", graph(4, [(0, 1), (1, 2), (0, 2)]),
                  graph(4, [(0, 1), (1, 2), (2, 3)]), False))
    pairs.append(("k23_vs_c5", graph(5, [(i, j + 2) for i in range(2) for j in range(3)]),
                  graph(5, [(i, (i + 1) % 5) for i in range(5)]), False))
    pairs.append(("2triangles_vs_c3c3_colored",
                  graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], [0, 0, 0, 1, 1, 1]),
                  graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], [0, 0, 1, 1, 1, 0]), True))
    pairs.append(("colored_path_swap",
                  graph(4, [(0, 1), (1, 2), (2, 3)], [0, 1, 1, 0]),
                  graph(4, [(0, 1), (1, 2), (2, 3)], [1, 0, 0, 1]), True))
    pairs.append(("c6_vs_2c3_colored",
                  graph(6, [(i, (i + 1) % 6) for i in range(6)], [0] * 6),
                  graph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], [0] * 6), True))
    pairs.append(("paw_vs_c4", graph(4, [(0, 1), (1, 2), (0, 2), (0, 3)]),
                  graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)]), False))
    pairs.append(("bull_vs_cricket", graph(5, [(0, 1), (1, 2), (0, 2), (1, 3), (2, 4)]),
                  graph(5, [(0, 1), (1, 2), (0, 2), (1, 3), (1, 4)]), False))
    pairs.append(("diamond_vs_c4", graph(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]),
                  graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)]), False))
    pairs.append(("k5_vs_k5_minus", graph(5, [(i, j) for i in range(5) for j in range(i + 1, 5)]),
                  graph(5, [(i, j) for i in range(5) for j in range(i + 1, 5) if (i, j) != (3, 4)]), False))
    pairs.append(("house_vs_gem", graph(5, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4), (1, 4)]),
                  graph(5, [(0, 1), (1, 2), (2, 3), (0, 4), (1, 4), (2, 4), (3, 4)]), False))
    pairs.append(("2k2_vs_p4_colored", graph(4, [(0, 1), (2, 3)], [0, 1, 0, 1]),
                  graph(4, [(0, 1), (1, 2), (2, 3)], [0, 1, 0, 1]), True))
    if include_cfi:
        a, b = twisted_pair(BASE_LIBRARY["k4"], 2)
        pairs.append(("cfi_k4_twisted", to_graph(a), to_graph(b), True))
    return pairs


def experiment_wl_calibrate(k_max: int = 4, dim_max: int = 3,
                            timeout_s: float = 300.0,
                            workers: Optional[int] = None,
                            include_cfi: bool = True,
                            pairs: Optional[list] = None) -> dict:
    """Fit the single offset between minimal refutation degree and WL
    dimension over the calibration corpus; rows keep the per-pair data."""
    if pairs is None:
        pairs = calibration_pairs(include_cfi)
    cells = [(name, _calibration_cell, (name, g, h, colored, k_max, dim_max))
             for (name, g, h, colored) in pairs]
    results = run_cells(cells, timeout_s, workers)
    rows = [results[name] for (name, _, _, _) in pairs]
    offsets = sorted({row["min_degree"] - row["wl_dim"] for row in rows
                      if row.get("min_degree") is not None and row.get("wl_dim") is not None})
    return {"rows": rows, "offsets": offsets,
            "c": offsets[0] if len(offsets) == 1 else None}


def experiment_csp_sweep(cycle_min: int = 3, cycle_max: int = 8, k: int = 3,
                         timeout_s: float = 600.0,
                         workers: Optional[int] = None) -> list:
    """Two-coloring dichotomy sweep: direct k-consistency, resolution on the
    clause encoding, and brute-force homomorphism, per cycle."""
    cells = [(n, _csp_cell, (n, k)) for n in range(cycle_min, cycle_max + 1)]
    results = run_cells(cells, timeout_s, workers)
    return [results[n] for n in range(cycle_min, cycle_max + 1)]


# --- report persistence ------------------------------------------------------

def rows_to_csv(rows: list) -> str:
    if not rows:
        return ""
    keys = sorted({k for row in rows for k in row})
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=keys)
    writer.writeheader()
    for row in rows:
        writer.writerow({k: json.dumps(row[k]) if isinstance(row[k], (list, dict))
                         else row[k] for k in row})
    return buf.getvalue()


def write_report(rows: list, csv_path: Optional[str] = None,
                 json_path: Optional[str] = None):
    if csv_path:
        with open(csv_path, "w") as fh:
            fh.write(rows_to_csv(rows))
    if json_path:
        with open(json_path, "w") as fh:
            json.dump(rows, fh, indent=1)
            fh.write("\n")
