# Earth Mover's Distance versus plain vector distances
#
# Two frames are summarised by the same two bins with equal weights.  The
# bin means differ slightly, and in the second frame the bins are listed in
# the opposite order.  A vector distance compares bins position by position;
# the transport cost is free to match any bin with any other.

import numpy as np

from reamp.ingest import HistogramFeatures
from reamp.transport import emd


def hist(weights, means):
    w = np.asarray(weights, dtype=float)
    return HistogramFeatures(w, np.asarray(means, dtype=float)[:, None],
                             np.arange(len(w) + 1, dtype=float))


a = hist([0.5, 0.5], [0.3, 0.7])
b = hist([0.5, 0.5], [0.4, 0.6])
b_swapped = hist([0.5, 0.5], [0.6, 0.4])

# The Manhattan distance between the mean vectors is twice the transport
# cost: every bin moves 0.1, and each carries half of the mass.

print("manhattan(a, b)      =", np.abs(a.features - b.features).sum())
print("emd(a, b)            =", emd(a, b, "manhattan").cost)

# Reordering the bins of b changes the vector distance a lot but leaves the
# transport cost alone, since the optimal plan simply follows the bins.

print("manhattan(a, b_swap) =", np.abs(a.features - b_swapped.features).sum())
print("emd(a, b_swap)       =", emd(a, b_swapped, "manhattan").cost)

plan = emd(a, b_swapped, "manhattan").flows
print("optimal plan for the swapped pair:\n", plan)
