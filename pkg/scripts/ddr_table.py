"""Table of double-edge coefficients of the genus-one DDR correction against the closed form."""
import sys

from logdr.genus1 import ddr_closed_form, ddr_m12

bound = int(sys.argv[1]) if len(sys.argv) > 1 else 4
bad = 0
for a in range(1, bound + 1):
    for b in range(1, bound + 1):
        coef = sum(s.coef for s in ddr_m12(a, b, check=False))
        ok = coef == ddr_closed_form(a, b)
        bad += not ok
        print(f"a={a} b={b}  pipeline {coef}  closed form {ddr_closed_form(a, b)}  {'ok' if ok else 'DIFF'}")
sys.exit(1 if bad else 0)
