"""Vectorised brute-force satisfiability over small Kripke models.

This is an oracle that is independent of the search code: every frame,
nominal assignment and valuation over ``n`` states is laid out as a numpy
axis and formulas are evaluated over all of them at once.  Handles
``box``/``dia``, ``@`` and the boolean connectives (no binders).
"""

from __future__ import annotations

import itertools

import numpy as np

from .syntax import And, At, Down, Formula, Modal, Nom, Not, Prop, Top, all_nominals, prop_vars


class _Space:
    def __init__(self, n: int, props: list, noms: list):
        self.n = n
        # frames: all n x n relations, shape (F, n, n)
        F = 2 ** (n * n)
        bits = (np.arange(F)[:, None] >> np.arange(n * n)) & 1
        self.R = bits.astype(bool).reshape(F, n, n)
        combos = list(itertools.product(range(n), repeat=len(noms)))
        self.asg = np.array(combos, dtype=np.int64).reshape(len(combos), len(noms))
        V = 2 ** (n * len(props))
        self.vbits = ((np.arange(V)[:, None] >> np.arange(n * len(props))) & 1).astype(bool).reshape(V, len(props), n)
        self.props = {p: k for k, p in enumerate(props)}
        self.noms = {i: k for k, i in enumerate(noms)}
        self.shape = (F, len(self.asg), V, n)

    def ev(self, f: Formula, memo: dict) -> np.ndarray:
        hit = memo.get(f)
        if hit is not None:
            return hit
        F, A, V, n = self.shape
        if isinstance(f, Top):
            out = np.ones((1, 1, 1, n), dtype=bool)
        elif isinstance(f, Prop):
            out = self.vbits[:, self.props[f.name], :][None, None, :, :]
        elif isinstance(f, Nom):
            k = self.noms[f.name]
            out = (self.asg[:, k][:, None] == np.arange(n)[None, :])[None, :, None, :]
        elif isinstance(f, Not):
            out = ~self.ev(f.arg, memo)
        elif isinstance(f, And):
            out = self.ev(f.left, memo) & self.ev(f.right, memo)
        elif isinstance(f, Modal):
            (a,) = f.args
            x = np.broadcast_to(self.ev(a, memo), self.shape)
            # succ[f, a, v, s] = exists t: R[f, s, t] and x[f, a, v, t]
            R = self.R[:, None, None, :, :]
            if f.op == "dia":
                out = (R & x[:, :, :, None, :]).any(axis=-1)
            elif f.op == "box":
                out = (~R | x[:, :, :, None, :]).all(axis=-1)
            else:
                raise ValueError(f"unsupported operator {f.op}")
        elif isinstance(f, At):
            x = np.broadcast_to(self.ev(f.arg, memo), self.shape)
            k = self.noms[f.nom]
            idx = self.asg[:, k]
            vals = x[:, np.arange(len(idx)), :, idx]  # (A, F, V)
            out = np.moveaxis(vals, 0, 1)[:, :, :, None]
        elif isinstance(f, Down):
            raise ValueError("binders are not supported by the brute-force oracle")
        else:
            raise TypeError(repr(f))
        memo[f] = out
        return out


def kripke_satisfiable(f: Formula, max_states: int = 3) -> int | None:
    """Smallest ``n <= max_states`` with a Kripke model of ``f``, else ``None``."""
    props = sorted(prop_vars(f))
    noms = sorted(all_nominals(f))
    for n in range(1, max_states + 1):
        sp = _Space(n, props, noms)
        if sp.ev(f, {}).any():
            return n
    return None


__all__ = ["kripke_satisfiable"]
