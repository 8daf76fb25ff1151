"""Reproduce every reference table into one directory.

Writes the data files (tables, sweeps, sequences, Richardson reports, sign
fits) plus ``summary.md`` comparing each reproduced number with its
reference value.
"""

from __future__ import annotations

import logging
import time
from pathlib import Path

import gmpy2
from gmpy2 import mpfr, mpq

from . import reference as ref
from .accel import SequenceData, richardson_report, write_report_csv
from .exact import format_rational, precision
from .large_order import (best_pure_cosine, fit_growth, row_signs, sign_grid_search,
                          sign_score, write_estimates_csv, write_peaks_json,
                          zeta_consistency_K)
from .lattice import ModelId, generate_blasius, generate_instanton, save_table
from .oracles import blasius_shoot, instanton_slope
from .pade import FrobeniusSeries, approximant_sweep, write_sweep_csv
from .vpt import VptProblem, vpt_sequence, write_vpt_csv

log = logging.getLogger("strongcoupling")

INSTANTON_ORDER = 200
BLASIUS_ORDER = 300
VPT_ORDER = 200


class Summary:
    def __init__(self):
        self.lines = ["# Reproduction summary", ""]
        self.failures = 0

    def section(self, title):
        self.lines += ["", f"## {title}", ""]

    def check(self, label, computed, expected, ok, note=""):
        mark = "ok" if ok else "MISMATCH"
        if not ok:
            self.failures += 1
        extra = f" ({note})" if note else ""
        self.lines.append(f"- {label}: computed {computed}, reference {expected}: {mark}{extra}")

    def text(self, line):
        self.lines.append(line)

    def render(self) -> str:
        head = f"{self.failures} mismatches against reference values."
        return "\n".join(self.lines[:2] + [head] + self.lines[2:]) + "\n"


def _note(table, key):
    return ref.SUSPECT.get((table, key), "")


def _compare_printed(s: Summary, label, value, printed, table=None, key=None, digits=25):
    ok = ref.matches_printed(value, printed)
    s.check(label, f"{value:.{digits}g}", printed, ok, _note(table, key) if table else "")


def _compare_report(s: Summary, name, rows, table):
    for r in rows:
        printed, flag = table[r.k]
        ok = ref.matches_printed(r.value, printed) and r.flag == flag
        s.check(f"{name} Richardson k={r.k}", f"{r.value:.22g} {r.flag}", f"{printed} {flag}",
                ok, _note(_table_name(table), r.k))


def _table_name(table):
    for name in dir(ref):
        if getattr(ref, name) is table:
            return name
    return ""


def _coefficients(s, out, table, printed, name):
    lines = ["j,computed,reference,equal"]
    for j, text in sorted(printed.items()):
        got = table.value(1, j)
        ok = got == mpq(text)
        lines.append(f"{j},{format_rational(got)},{text},{int(ok)}")
        s.check(f"a[1,{j}]", format_rational(got), text, ok, _note(name, j))
    path = out / f"{table.model.value}_coefficients.csv"
    path.write_text("\n".join(lines) + "\n")
    return path


def build_report(out: Path, tables: dict, prec: int = 256, jobs: int = 1,
                 signfit_resolution: int = 2000) -> list:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    s = Summary()
    t0 = time.time()

    inst = tables.get(ModelId.INSTANTON) or generate_instanton(INSTANTON_ORDER)
    blas = tables.get(ModelId.BLASIUS) or generate_blasius(BLASIUS_ORDER)
    if ModelId.INSTANTON not in tables:
        written.append(save_table(inst, out / "instanton.json"))
    if ModelId.BLASIUS not in tables:
        # the full Blasius table is hundreds of MB; sites 1 and 2 suffice downstream
        written.append(save_table(blas, out / "blasius_sites1-2.json.gz", max_site=2))
    log.info("tables ready after %.1f s", time.time() - t0)

    # instanton -----------------------------------------------------------
    s.section("Instanton coefficients a[1,j]")
    written.append(_coefficients(s, out, inst, ref.INSTANTON_A1, "INSTANTON_A1"))
    for j, text in ref.INSTANTON_A1_SERIES_TERMS.items():
        s.check(f"series term delta^{j}", format_rational(inst.value(1, j)), text,
                inst.value(1, j) == mpq(text))

    s.section("Instanton strong-coupling approximants")
    with precision(prec):
        root_half = 1 / gmpy2.sqrt(mpfr(2))
    sweep = approximant_sweep(FrobeniusSeries(inst.site_series(1), mpq(1, 2)),
                              inst.max_order, root_half, prec, jobs)
    written.append(out / "instanton_pade.csv")
    write_sweep_csv(sweep, written[-1])
    for r in sweep.records[:20]:
        _compare_printed(s, f"S_{r.N}", r.S_N.re, ref.INSTANTON_PADE[r.N], "INSTANTON_PADE",
                         r.N, 12)
    m = sweep.minimum()
    n_ref, v_ref = ref.INSTANTON_PADE_MINIMUM
    s.check("first minimum", f"N={m.N} S={m.S_N.re:.10f}", f"N={n_ref} S={v_ref}",
            m.N == n_ref and abs(m.S_N.re - mpfr(v_ref)) <= mpfr("1e-7"))
    ups = [n for n, d in sweep.crossings() if d == "up"]
    s.check("upward crossing of 1/sqrt(2)", ups[:1], ref.INSTANTON_PADE_CROSSING,
            ups[:1] == [ref.INSTANTON_PADE_CROSSING], f"all crossings {sweep.crossings()}")
    windows = sweep.complex_windows()
    s.check("first complex window", windows[:1], ref.INSTANTON_PADE_FIRST_COMPLEX_WINDOW,
            windows[:1] == [ref.INSTANTON_PADE_FIRST_COMPLEX_WINDOW],
            f"all windows {windows}")

    s.section("Instanton variational coefficients")
    vp = VptProblem(inst.site_coefficients(1, VPT_ORDER), -1, 2)
    vseq = vpt_sequence(vp, VPT_ORDER, prec=prec, jobs=jobs)
    written.append(out / "instanton_vpt.csv")
    write_vpt_csv(vseq, written[-1])
    for N, printed in ref.INSTANTON_VPT.items():
        _compare_printed(s, f"b0({N})", vseq.by_order(N).b0, printed, digits=12)
    last = vseq.by_order(VPT_ORDER)
    _compare_printed(s, "k0(200)", last.k0, ref.INSTANTON_VPT_K0_200, digits=12)
    _compare_printed(s, "b0(200)", last.b0, ref.INSTANTON_VPT_B0_200, digits=12)
    rows = richardson_report(SequenceData(vseq.b0_values(), 1), 6, prec=prec)
    written.append(out / "instanton_vpt_richardson.csv")
    write_report_csv(rows, written[-1])
    _compare_report(s, "b0", rows, ref.INSTANTON_VPT_RICHARDSON)
    dev = (1 - rows[-1].value / root_half) * 100
    s.check("deviation from 1/sqrt(2) in percent", f"{dev:.4f}",
            ref.INSTANTON_VPT_DEVIATION_PERCENT, abs(dev - mpfr("0.099")) <= mpfr("0.003"))

    s.section("Instanton large-order growth")
    fits = {}
    for site in (1, 2):
        fits[site] = fit_growth(inst.site_coefficients(site), site, K=ref.INSTANTON_B_K, prec=prec)
        written.append(out / f"instanton_growth_site{site}.csv")
        write_estimates_csv(fits[site], written[-1])
        for name, rep in (("A", fits[site].A_report), ("K", fits[site].K_report),
                          ("B", fits[site].B_report)):
            written.append(out / f"instanton_{name}{site}_richardson.csv")
            write_report_csv(rep, written[-1])
    _compare_report(s, "A (site 1)", fits[1].A_report, ref.INSTANTON_A_RICHARDSON)
    _compare_report(s, "K (site 1)", fits[1].K_report, ref.INSTANTON_K_RICHARDSON)
    _compare_report(s, "B2", fits[2].B_report, ref.INSTANTON_B2_RICHARDSON)
    growth = {"A": fits[1].A_report[-1].value, "K": fits[1].K_report[-1].value,
              "B1": fits[1].B_report[-1].value, "B2": fits[2].B_report[-1].value}
    tol = {"A": "1e-5", "K": "1e-6", "B1": "2e-4", "B2": "2e-4"}
    for key, value in growth.items():
        s.check(key, f"{value:.12g}", ref.INSTANTON_GROWTH[key],
                abs(value - mpfr(ref.INSTANTON_GROWTH[key])) <= mpfr(tol[key]))
    kz = zeta_consistency_K(mpfr(ref.INSTANTON_GROWTH["B1"]), mpfr(ref.INSTANTON_GROWTH["B2"]),
                            prec)
    s.check("zeta-consistency K", f"{kz:.6f}", ref.ZETA_CONSISTENCY_K,
            abs(kz - mpfr(ref.ZETA_CONSISTENCY_K)) <= mpfr("0.001"))

    # Blasius -------------------------------------------------------------
    s.section("Blasius coefficients a[1,j]")
    written.append(_coefficients(s, out, blas, ref.BLASIUS_A1, "BLASIUS_A1"))

    s.section("Blasius strong-coupling approximants")
    bsweep = approximant_sweep(FrobeniusSeries(blas.site_series(1, ref.BLASIUS_PADE_RICHARDSON_TERMS),
                                               mpq(1, 2)),
                               ref.BLASIUS_PADE_RICHARDSON_TERMS, None, prec, jobs)
    written.append(out / "blasius_pade.csv")
    write_sweep_csv(bsweep, written[-1])
    for r in bsweep.records[:20]:
        _compare_printed(s, f"S_{r.N}", r.S_N.re, ref.BLASIUS_PADE[r.N], "BLASIUS_PADE", r.N, 12)
    real = [r for r in bsweep.records if r.is_real]
    rows = richardson_report(SequenceData([r.S_N.re for r in real], real[0].N), 3, prec=prec)
    written.append(out / "blasius_pade_richardson.csv")
    write_report_csv(rows, written[-1])
    _compare_report(s, "S_N", rows, ref.BLASIUS_PADE_RICHARDSON)

    s.section("Blasius variational coefficients")
    bp = VptProblem(blas.site_coefficients(1, VPT_ORDER), -2, 4)
    bseq = vpt_sequence(bp, VPT_ORDER, prec=prec, jobs=jobs)
    written.append(out / "blasius_vpt.csv")
    write_vpt_csv(bseq, written[-1])
    for N, printed in ref.BLASIUS_VPT.items():
        _compare_printed(s, f"b0({N})", bseq.by_order(N).b0, printed, digits=16)
    _compare_printed(s, "b0(200)", bseq.by_order(VPT_ORDER).b0, ref.BLASIUS_VPT_B0_200,
                     "BLASIUS_VPT_B0_200", 0, digits=16)
    rows = richardson_report(SequenceData(bseq.b0_values(), 1), 6, prec=prec)
    written.append(out / "blasius_vpt_richardson.csv")
    write_report_csv(rows, written[-1])
    _compare_report(s, "b0", rows, ref.BLASIUS_VPT_RICHARDSON)
    stress = blasius_shoot()
    dev = (rows[-1].value / stress - 1) * 100
    s.check("excess over the shooting value in percent", f"{dev:.3f}",
            ref.BLASIUS_VPT_DEVIATION_PERCENT, abs(dev - mpfr("1.5")) <= mpfr("0.1"))

    s.section("Blasius sign pattern")
    signs = row_signs(blas.site_coefficients(1, 300))
    fits_out = []
    for a, b in ref.BLASIUS_SIGN_FITS:
        f = sign_score(signs, float(a), float(b))
        fits_out.append(f)
        s.check(f"f({a}, {b})", f"{f.score} mismatches {list(f.mismatches)}", len(signs),
                f.score == len(signs), _note("BLASIUS_SIGN_FITS", ref.BLASIUS_SIGN_FITS.index((a, b))))
    for a_rng in ((1.0, 2.0), (7.0, 8.0)):
        peaks = sign_grid_search(signs, a_rng, (2.8, 3.3), signfit_resolution)
        fits_out.extend(peaks)
        for f in peaks:
            s.text(f"- grid peak a={f.a:.6f} b={f.b:.5f} score {f.score}")
    written.append(out / "blasius_signfit.json")
    write_peaks_json(fits_out, written[-1])
    pure = best_pure_cosine(signs)
    found = sorted({tuple(p.mismatches) for p in pure})
    s.check("pure-cosine mismatches", found, list(ref.BLASIUS_PURE_COSINE_MISMATCHES),
            found == [ref.BLASIUS_PURE_COSINE_MISMATCHES],
            _note("BLASIUS_PURE_COSINE_MISMATCHES", 0))

    s.section("Continuum oracles")
    s.check("Blasius y''(0)", f"{stress:.7f}", ref.BLASIUS_STRESS,
            abs(stress - float(ref.BLASIUS_STRESS)) <= 1e-5)
    slope = instanton_slope(1, prec)
    s.check("instanton f'(0)", f"{slope:.12f}", ref.INSTANTON_SLOPE,
            abs(slope - mpfr(ref.INSTANTON_SLOPE)) <= mpfr("1e-9"))

    log.info("report finished after %.1f s", time.time() - t0)
    summary = out / "summary.md"
    summary.write_text(s.render())
    written.append(summary)
    return [Path(p) for p in written]
