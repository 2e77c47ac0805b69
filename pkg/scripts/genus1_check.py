"""Compare the theta pipeline with DR - L'/2 in genus one for all small A."""
import itertools
import sys
import time

from logdr.genus1 import logdr_g1
from logdr.pixton import p_theta_class
from logdr.ppoly import pp_equal
from logdr.stability import default_theta

bound = int(sys.argv[1]) if len(sys.argv) > 1 else 3
failures = 0
for n in (1, 2, 3):
    th = default_theta(1, n, seed=1)
    one = (0,) * (n + 1)
    for head in itertools.product(range(-bound, bound + 1), repeat=n - 1):
        A = tuple(head) + (-sum(head),)
        if abs(A[-1]) > bound:
            continue
        t = time.perf_counter()
        a = p_theta_class(1, n, A, 0, th, trunc=1).degree_part(1)
        b = logdr_g1(n, A, 0)
        ok = a.minus(b).is_zero()
        failures += not ok
        print(f"A={A}: {'ok' if ok else 'DIFF'} ({time.perf_counter() - t:.2f}s)")
sys.exit(1 if failures else 0)
