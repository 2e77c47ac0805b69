"""Cone counts of the theta subdivision over the dollar-sign graph in genus two."""
from logdr.graphs import StableGraph, canonical, quasi_stable_models
from logdr.stability import default_theta, stable_multidegrees
from logdr.subdivision import theta_subdivision, validate_subdivision

DOLLAR = canonical(StableGraph((0, 0), ((1,), (2,)), ((0, 1),) * 3, 2))

th = default_theta(2, 2, seed=1)
models = quasi_stable_models(DOLLAR)
per_model = [len(stable_multidegrees(q, th, 0)) for q in models]
print(f"quasi-stable models: {len(models)}, stable multidegrees per model: {per_model} (total {sum(per_model)})")
s = theta_subdivision(2, 2, (3, -3), 0, th, graphs=[DOLLAR])
print("cones by dimension:", s.counts(DOLLAR))
# validation needs the faces too, so it runs on the whole fan
print("whole fan valid:", validate_subdivision(theta_subdivision(2, 2, (3, -3), 0, th)).ok)
