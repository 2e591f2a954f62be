"""Quick check of the Python bindings: python python/smoke_test.py"""
import cmath
import math

import lrtrace_py as lt

vol = lt.volume_figure_eight()
assert abs(vol - 2.029883212819307) < 1e-12
assert abs(vol - 4 * lt.lobachevsky(math.pi / 6)) < 1e-13

theta = 0.7
li2 = lt.dilog(cmath.exp(2j * theta))
assert abs(li2.imag - 2 * lt.lobachevsky(theta)) < 1e-12

h = 0.1
z = complex(math.pi / 2, 0.05)
lhs = lt.big_qdl(z + math.pi * h, h) * (1 - cmath.exp(2j * z + 1j * math.pi * h))
assert abs(lhs - lt.big_qdl(z, h)) < 1e-9 * abs(lhs)

lift = lt.LogLift.preset("hyperbolic")
assert lift.windings == (0, 0, 0)
again = lt.LogLift.from_json(lift.to_json())
assert again.A == lift.A

tr = lt.trace_lr(lift, 801)
assert tr.congruence == 1
assert abs(tr.log_modulus_over_n - 0.16003) < 1e-4
assert abs(lt.trace_ratio(lift, 801) - 1) < 5e-3

other = lt.LogLift(complex(0.7, -1.2), "-")
assert len(other.weights) == 3

idx, vals = lt.sigma_cloud(complex(0.4, 0.3), 33, 5)
assert len(idx) == len(vals) == 33
assert abs(sum(vals) - lt.sigma_sum(complex(0.4, 0.3), 33, 5)) < 1e-9 * abs(sum(vals))

try:
    lt.trace_lr(lift, 100)
except ValueError:
    pass
else:
    raise AssertionError("even level accepted")

rows = lt.run_verify(only="dq")
assert rows and all(passed for _, _, passed, _ in rows)

print("smoke test passed")
