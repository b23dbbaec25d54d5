#!/usr/bin/env python3
"""Solve an exported .lp file with an independent MILP engine (HiGHS via SciPy).

Usage:
    solve_lp.py model.lp [--drop-block PREFIX]

Prints "objective <value>" on optimality or "infeasible". --drop-block removes
every constraint whose name starts with PREFIX before solving, which is how
the relaxation tests solve a program without a given equation block.
"""

import argparse
import re
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix


def parse_terms(text, var_index):
    """Parse '3 x + 2 y - 4 z' into {index: coefficient}."""
    terms = {}
    tokens = text.replace("+", " + ").replace("-", " - ").split()
    sign, coeff = 1, None
    for tok in tokens:
        if tok == "+":
            sign, coeff = 1, None
        elif tok == "-":
            sign, coeff = -1, None
        elif re.fullmatch(r"-?\d+", tok):
            coeff = int(tok)
        else:
            idx = var_index.setdefault(tok, len(var_index))
            terms[idx] = terms.get(idx, 0) + sign * (1 if coeff is None else coeff)
            sign, coeff = 1, None
    return terms


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("lp_file")
    ap.add_argument("--drop-block", default=None)
    args = ap.parse_args()

    section = None
    objective = {}
    rows = []  # (name, terms, rel, rhs)
    bounds_fixed = {}
    bounds_upper = {}
    var_index = {}

    with open(args.lp_file) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("\\"):
                continue
            lowered = line.lower()
            if lowered in ("minimize", "subject to", "bounds", "generals",
                           "binaries", "end"):
                section = lowered
                continue
            if section == "minimize":
                body = line.split(":", 1)[1] if ":" in line else line
                objective.update(parse_terms(body, var_index))
            elif section == "subject to":
                name, body = line.split(":", 1)
                m = re.search(r"(<=|>=|=)", body)
                rel = m.group(1)
                lhs, rhs = body[: m.start()], body[m.end():]
                rows.append((name.strip(), parse_terms(lhs, var_index), rel,
                             int(rhs)))
            elif section == "bounds":
                if "<=" in line:
                    lo, name, hi = re.fullmatch(
                        r"(-?\d+)\s*<=\s*(\S+)\s*<=\s*(-?\d+)", line).groups()
                    idx = var_index.setdefault(name, len(var_index))
                    bounds_upper[idx] = int(hi)
                else:
                    name, value = re.fullmatch(r"(\S+)\s*=\s*(-?\d+)",
                                               line).groups()
                    idx = var_index.setdefault(name, len(var_index))
                    bounds_fixed[idx] = int(value)
            elif section in ("generals", "binaries"):
                for name in line.split():
                    idx = var_index.setdefault(name, len(var_index))
                    if section == "binaries" and idx not in bounds_fixed:
                        bounds_upper.setdefault(idx, 1)

    n = len(var_index)
    c = np.zeros(n)
    for idx, coeff in objective.items():
        c[idx] = coeff

    lb = np.zeros(n)
    ub = np.full(n, np.inf)
    for idx, hi in bounds_upper.items():
        ub[idx] = hi
    for idx, v in bounds_fixed.items():
        lb[idx] = ub[idx] = v

    kept = [r for r in rows
            if not (args.drop_block and r[0].startswith(args.drop_block))]
    constraints = []
    if kept:
        a = lil_matrix((len(kept), n))
        clb = np.zeros(len(kept))
        cub = np.zeros(len(kept))
        for i, (_, terms, rel, rhs) in enumerate(kept):
            for idx, coeff in terms.items():
                a[i, idx] = coeff
            if rel == "<=":
                clb[i], cub[i] = -np.inf, rhs
            elif rel == ">=":
                clb[i], cub[i] = rhs, np.inf
            else:
                clb[i] = cub[i] = rhs
        constraints = [LinearConstraint(a.tocsr(), clb, cub)]

    res = milp(c, constraints=constraints,
               integrality=np.ones(n), bounds=Bounds(lb, ub))
    if res.status == 0:
        print(f"objective {round(res.fun)}")
    elif res.status == 2:
        print("infeasible")
    else:
        print(f"solver-status {res.status}")
        sys.exit(1)


if __name__ == "__main__":
    main()
