"""Sparse vs data-support counterfactuals for one rejected individual.

Growing spheres finds the nearest decision flip in feature space; the latent
engine searches through a generative model, so its recommendation lands near
actual accepted applicants. The sparse one is cheaper, the supported one is
more plausible: the central trade-off this package quantifies.
"""

import numpy as np

from recoursekit import (
    RecourseRequest,
    TrainConfig,
    fit_percentiles,
    growing_spheres,
    latent_recourse,
    split,
    synthesize_credit,
    train_autoencoder,
    train_linear,
)
from recoursekit.analytics import cost_report

data = synthesize_credit(n=2000, seed=0)
train, test = split(data, 0.8, seed=0)
transform = fit_percentiles(train)

f = train_linear(train, l2_strength=1e-3, epochs=200, seed=0)
ae = train_autoencoder(train, k=3, config=TrainConfig(epochs=40, seed=0))

rejected = np.nonzero(f.decide(test.X) == -1)[0]
x = test.X[rejected[0]]
print(f"rejected individual (score {f.score_one(x):+.3f}):")

request = RecourseRequest(x=x, targets=(f,), schema=data.schema, budget=4000, seed=0)
sparse = growing_spheres(request, step=0.1)
support = latent_recourse(request, ae, step=0.1)

for tag, res in (("sparse (GS)", sparse), ("data support (latent)", support)):
    print(f"\n{tag}: found={res.found}, shells={res.shell_index}")
    for j, name in enumerate(data.schema.names):
        if res.x_cf[j] != x[j]:
            print(f"  {name:<24} {x[j]:8.2f} -> {res.x_cf[j]:8.2f}")
    costs = cost_report(transform, x, res.x_cf)
    print(f"  l2 cost {costs.norm_cost:.3f}, total shift {costs.cost_total:.3f}, "
          f"max shift {costs.cost_max:.3f}")

print("\nsupported recommendations cost more but change the whole profile "
      "toward accepted applicants.")
