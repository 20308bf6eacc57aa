"""Smoke test for the Python bindings.

Build first:  maturin develop -m crates/python/Cargo.toml
"""
import json
import math

import opineq

log = opineq.ScalarFunction("log")
assert str(log) == "log"
assert abs(log.check(1.0) - 1.0) < 1e-12
assert abs(log.breve(2.0) - (1.0 + math.log(2.0))) < 1e-12
assert abs(log.tilde()(2.0) - math.log(2.0)) < 1e-15

value, argmin, boundary = opineq.legendre(log, 0.5)
assert abs(value - (1.0 + math.log(0.5))) < 1e-8 and not boundary

evals, _ = opineq.eigh([[2, 1j], [-1j, 2]])
assert max(abs(x - y) for x, y in zip(evals, [1.0, 3.0])) < 1e-12

phi = opineq.PositiveMap.random(2, 3, 2, 7)
psi = opineq.PositiveMap.random(3, 3, 2, 8)
assert (phi.in_dim, phi.out_dim) == (2, 3) and phi.certificate > 0

a = opineq.random_pd(2, 1)
b = opineq.random_pd(3, 2)
inv = opineq.ScalarFunction("invpower:1")
x = opineq.core_functional(log, inv, inv, phi, psi, a, b)
y = opineq.inverse_form(log, inv, inv, phi, psi, a, b)
assert abs(x - y) <= 1e-9 * (1 + abs(x)), (x, y)

pgd, oracle, _ = opineq.trace_h_variational(opineq.ScalarFunction("power:0.5"), opineq.random_pd(3, 5))
assert abs(pgd - oracle) <= 1e-6 * (1 + abs(oracle)), (pgd, oracle)

try:
    opineq.ScalarFunction("power:-1")
except ValueError:
    pass
else:
    raise AssertionError("bad tag accepted")

cfg = {"version": 1, "suites": [{"suite": "sharpness_search", "r": 0.75, "trial": {"trials": 20}}]}
report = json.loads(opineq.run_experiment(json.dumps(cfg))[0])
assert report["violations"] > 0 and report["passed"]

assert all(err < 1e-8 for _, err, _ in opineq.golden_table())
print("smoke test ok")
