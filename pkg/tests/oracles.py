"""Independent numerical oracles used by the test suite.

These are deliberately written against different formulas than the library
code: the two-sided reflection uses the explicit inf/sup representation of
the Skorokhod map on an interval (not the step-by-step projection), and the
stopping-rule enumeration walks the tree combinatorially.
"""

import itertools

import numpy as np


def skorokhod_map_interval(psi, lo, hi):
    """Discrete two-sided Skorokhod map on [lo, hi] via the explicit formula.

    Parameters
    ----------
    psi : array, shape (n_steps + 1,)
        Free (unconstrained) path, psi[0] in [lo, hi].
    lo, hi : floats
        Interval endpoints.

    Returns
    -------
    x : array, shape (n_steps + 1,)
        Reflected path, x[k] in [lo, hi].

    The formula (for the map onto [0, a]) is

        x(k) = psi(k) - max( 0 ^ min_{u<=k} psi(u),
                             max_{s<=k} [ (psi(s) - a) ^ min_{s<=u<=k} psi(u) ] )

    where ``^`` is pointwise minimum.  Evaluated incrementally in k.
    """
    psi = np.asarray(psi, dtype=float) - lo
    a = hi - lo
    n = psi.shape[0]
    x = np.empty(n)
    # running min of psi[0..k]
    run_min = np.inf
    # v[s] = (psi[s] - a) ^ min_{s<=u<=k} psi[u], maintained for all s <= k
    tail_min = np.empty(n)  # min_{s<=u<=k} psi[u]
    shifted = psi - a
    for k in range(n):
        run_min = min(run_min, psi[k])
        tail_min[k] = psi[k]
        if k:
            np.minimum(tail_min[:k], psi[k], out=tail_min[:k])
        upper = np.max(np.minimum(shifted[: k + 1], tail_min[: k + 1]))
        xi = max(min(0.0, run_min), upper)
        x[k] = psi[k] - xi
    return x + lo


def reflect_bundle_free_walk(x0, increments, lo, hi):
    """Apply the explicit Skorokhod map to a free walk and recover pushes.

    Returns the reflected path and the per-step absolute push (the total
    variation increment of the boundary regulator).
    """
    psi = np.concatenate([[x0], x0 + np.cumsum(increments)])
    x = skorokhod_map_interval(psi, lo, hi)
    push = x[1:] - (x[:-1] + increments)
    return x, np.abs(push)


def enumerate_stopping_rules(children, max_rules=200_000):
    """All adapted stopping rules of a rooted tree, as stop-node frozensets.

    ``children[i]`` lists the child node ids of node i; node 0 is the root.
    A rule picks, for every reachable node, either "stop here" or "continue"
    (terminal nodes always stop).  Each rule is returned as the antichain of
    nodes where stopping occurs, which hits every root-to-leaf path exactly
    once.
    """

    def rules_at(node):
        kids = children[node]
        if not kids:
            return [frozenset([node])]
        out = [frozenset([node])]
        for combo in itertools.product(*(rules_at(c) for c in kids)):
            out.append(frozenset().union(*combo))
        return out

    rules = rules_at(0)
    if len(rules) > max_rules:
        raise ValueError(f"tree admits {len(rules)} rules, above cap {max_rules}")
    return rules


def count_stopping_rules(children, node=0):
    kids = children[node]
    if not kids:
        return 1
    prod = 1
    for c in kids:
        prod *= count_stopping_rules(children, c)
    return 1 + prod
