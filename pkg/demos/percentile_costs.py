"""How recourse effort is measured: percentile shifts through the data.

A move of +1 open credit line means something different for someone at the
median than for someone in the tail. The percentile transform turns every
feature move into quantile mass crossed, so costs are comparable across
features with wildly different units.
"""

import numpy as np

from recoursekit import fit_percentiles, split, synthesize_credit
from recoursekit.analytics import cost_max, cost_total

data = synthesize_credit(n=2000, seed=0)
train, test = split(data, 0.8, seed=0)
transform = fit_percentiles(train)

income = data.schema.index_of("MonthlyIncome")
late = data.schema.index_of("NumTimes30to59Late")
x = test.X[np.nonzero(test.X[:, late] > 0)[0][0]].copy()
print("individual:", np.round(x, 2))

# move monthly income up by one unit and pay one fewer late payment
x_cf = x.copy()
x_cf[income] += 1.0
x_cf[late] = max(0.0, x_cf[late] - 1.0)

for j in (income, late):
    name = data.schema.names[j]
    q0 = transform.percentile(j, x[j])
    q1 = transform.percentile(j, x_cf[j])
    print(f"{name}: {x[j]:.2f} -> {x_cf[j]:.2f}  (percentile {q0:.3f} -> {q1:.3f})")

print("total percentile shift :", round(cost_total(transform, x, x_cf), 4))
print("maximum percentile shift:", round(cost_max(transform, x, x_cf), 4))

# the same raw move costs different percentile mass at a different base point
x2 = test.X[5].copy()
x2_cf = x2.copy()
x2_cf[income] += 1.0
print("\nsame +1 income move from another base point:")
print("total percentile shift :", round(cost_total(transform, x2, x2_cf), 4))
