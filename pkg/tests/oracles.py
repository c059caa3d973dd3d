"""Exact joint-chain oracle for tiny single-class systems.

Enumerates the product state of all N users and every per-frame outcome
(request decisions, channel picks, data errors). Independent of both the
simulator code and ramac.markov_core.
"""

from __future__ import annotations

import itertools

import numpy as np


def joint_chain(N, k, a, c, n, e):
    user_states = ["I", "C"] + [f"T{j}" for j in range(n)]
    joint = list(itertools.product(user_states, repeat=N))
    index = {s: i for i, s in enumerate(joint)}
    P = np.zeros((len(joint), len(joint)))  # row-stochastic: P[from, to]
    grants_expect = np.zeros(len(joint))

    for s in joint:
        # per-user option lists: (prob, action) where action is None (no request),
        # ("req", channel) or ("data", failed)
        options = []
        for u in s:
            if u == "I":
                opts = [(1 - a, None)] + [(a / k, ("req", ch, "fresh")) for ch in range(k)]
            elif u == "C":
                opts = [(1 - c, None)] + [(c / k, ("req", ch, "retry")) for ch in range(k)]
            else:
                opts = [(e, ("data", True)), (1 - e, ("data", False))]
            options.append([o for o in opts if o[0] > 0])
        for combo in itertools.product(*options):
            prob = float(np.prod([p for p, _ in combo]))
            chans = [act[1] for _, act in combo if act and act[0] == "req"]
            nxt = []
            n_grants = 0
            for u, (_, act) in zip(s, combo):
                if act is None:
                    nxt.append("I")  # idle stays idle, collided gives up
                elif act[0] == "req":
                    if chans.count(act[1]) == 1:
                        nxt.append("T0")
                        n_grants += 1
                    else:
                        nxt.append("C" if act[2] == "fresh" else "I")
                else:
                    j = int(u[1:])
                    nxt.append(f"T{j + 1}" if act[1] and j < n - 1 else "I")
            P[index[s], index[tuple(nxt)]] += prob
            grants_expect[index[s]] += prob * n_grants

    # stationary row vector: solve pi (P - I) = 0 with normalization
    A = np.vstack([(P - np.eye(len(joint))).T, np.ones(len(joint))])
    b = np.zeros(len(joint) + 1)
    b[-1] = 1.0
    pi = np.linalg.lstsq(A, b, rcond=None)[0]

    occ = {st: 0.0 for st in user_states}
    for s, w in zip(joint, pi):
        for u in s:
            occ[u] += w / N
    return {
        "s_i": occ["I"],
        "s_c": occ["C"],
        "s_t0": occ["T0"],
        "s_t": sum(occ[f"T{j}"] for j in range(n)),
        "grant_rate": float(pi @ grants_expect),
    }
