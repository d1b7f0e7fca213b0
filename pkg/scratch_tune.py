"""Scratch: report every behavioral target for the shipped defaults."""
import time

import numpy as np

from avfsim import mechanics, presets, solver
from avfsim.experiments import compute_metrics, design_sweep, preset

t00 = time.perf_counter()

def report(name):
    asm, proto = preset(name)
    tr = solver.run_ramp(asm, proto)
    rep = compute_metrics(tr, asm)
    snaps = [(e.temp_C, e.kind) for e in solver.detect_events(tr, asm).snap_events]
    print(f"{name:14s} onset={rep.onset_temp} close={rep.closure_temp} "
          f"reopen={rep.reopening_temp} cls={rep.closure_pct:.2f}% "
          f"reop={rep.reopening_pct:.2f}% rom={rep.rom_pct:.2f}% "
          f"class={rep.snap_class} snaps={snaps}")
    return rep

print("--- mono ---")
report("L20_mono")
report("SME25_mono")
print("--- bidir ---")
rs = report("bidir_single")
rc = report("bidir_cross")
rd = report("bidir_diamond")
print(f"ordering diamond>others: {rd.reopening_pct > rc.reopening_pct and rd.reopening_pct > rs.reopening_pct}")
roms = [rs.rom_pct, rc.rom_pct, rd.rom_pct]
print(f"ROM spread = {max(roms)-min(roms):.2f} pp")
print("--- sweep L20 ---")
cells = design_sweep([20, 30, 40, 50, 60], [1, 2], "L20")
for c in cells:
    print(f"  a={c.a:>2} b={c.b} -> {c.outcome}")
print("--- sweep SME25 (60,2) ---")
for c in design_sweep([60], [2], "SME25"):
    print(f"  a={c.a} b={c.b} -> {c.outcome}")
print(f"total {time.perf_counter()-t00:.2f} s")
