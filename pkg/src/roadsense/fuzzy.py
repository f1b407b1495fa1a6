"""Mamdani-style fuzzy inference with a categorical output.

Rules fire with min-conjunction, activations are max-aggregated per
output label and the decision is the label with the largest activation
(ties broken by the system's ``tie_break`` order).  Crisp inputs outside
a variable's universe are clamped to it.

Systems round-trip through a JSON document::

    {"variables": [{"name": ..., "universe": [lo, hi],
                    "terms": {"label": [a, b, c] or [a, b, c, d]}}],
     "outputs": [...], "tie_break": [...],
     "rules": [{"if": {"var": "term", ...}, "then": "label"}]}
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoRuleFiredError


@dataclass(frozen=True)
class MembershipFunction:
    """Triangle ``(a, b, c)`` or trapezoid ``(a, b, c, d)``."""

    breakpoints: tuple

    def __post_init__(self):
        bp = tuple(float(v) for v in self.breakpoints)
        if len(bp) not in (3, 4):
            raise ValueError(f"need 3 (triangle) or 4 (trapezoid) breakpoints, got {len(bp)}")
        if not all(math.isfinite(v) for v in bp):
            raise ValueError(f"breakpoints must be finite: {bp}")
        if any(x > y for x, y in zip(bp, bp[1:])):
            raise ValueError(f"breakpoints must be non-decreasing: {bp}")
        object.__setattr__(self, "breakpoints", bp)

    @property
    def shape(self):
        return "triangle" if len(self.breakpoints) == 3 else "trapezoid"

    @property
    def corners(self):
        bp = self.breakpoints
        return bp if len(bp) == 4 else (bp[0], bp[1], bp[1], bp[2])

    def __call__(self, x):
        return eval_membership(self, x)


def eval_membership(mf, x):
    a, b, c, d = mf.corners
    if x < a or x > d:
        return 0.0
    if b <= x <= c:
        return 1.0
    if x < b:
        return (x - a) / (b - a)
    return (d - x) / (d - c)


def eval_membership_array(mf, x):
    """Vectorised :func:`eval_membership`."""
    a, b, c, d = mf.corners
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        rise = (x - a) / (b - a) if b > a else np.ones_like(x)
        fall = (d - x) / (d - c) if d > c else np.ones_like(x)
    out = np.where(x < b, rise, np.where(x > c, fall, 1.0))
    return np.where((x < a) | (x > d), 0.0, out)


@dataclass(frozen=True)
class FuzzyVariable:
    name: str
    universe: tuple
    terms: dict

    def __post_init__(self):
        lo, hi = (float(v) for v in self.universe)
        if not lo < hi:
            raise ValueError(f"{self.name}: empty universe {self.universe}")
        object.__setattr__(self, "universe", (lo, hi))
        terms = {}
        for label, mf in dict(self.terms).items():
            mf = mf if isinstance(mf, MembershipFunction) else MembershipFunction(tuple(mf))
            if mf.breakpoints[0] < lo or mf.breakpoints[-1] > hi:
                raise ValueError(f"{self.name}.{label}: breakpoints {mf.breakpoints} leave universe {self.universe}")
            terms[label] = mf
        if not terms:
            raise ValueError(f"{self.name}: no terms")
        object.__setattr__(self, "terms", terms)

    def clamp(self, x):
        lo, hi = self.universe
        return min(max(float(x), lo), hi)


def fuzzify(var, x):
    x = var.clamp(x)
    return {label: eval_membership(mf, x) for label, mf in var.terms.items()}


@dataclass(frozen=True)
class FuzzyRule:
    antecedent: dict
    consequent: str

    def __post_init__(self):
        if not self.antecedent:
            raise ValueError("rule antecedent is empty")
        object.__setattr__(self, "antecedent", dict(self.antecedent))


def fire_rule(rule, fuzzified):
    degrees = []
    for var, term in rule.antecedent.items():
        if var not in fuzzified:
            raise KeyError(f"no fuzzified input for variable {var!r}")
        degrees.append(fuzzified[var][term])
    return min(degrees)


@dataclass(frozen=True)
class FuzzySystem:
    variables: tuple
    output_labels: tuple
    rules: tuple
    tie_break: tuple = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "output_labels", tuple(self.output_labels))
        object.__setattr__(self, "rules", tuple(self.rules))
        tie = tuple(self.tie_break) if self.tie_break is not None else self.output_labels
        object.__setattr__(self, "tie_break", tie)
        if not self.rules or not self.output_labels:
            raise ValueError("a fuzzy system needs at least one rule and one output label")
        if len(set(self.output_labels)) != len(self.output_labels):
            raise ValueError("duplicate output labels")
        if sorted(tie) != sorted(self.output_labels):
            raise ValueError(f"tie_break {tie} is not a permutation of {self.output_labels}")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        by_name = self.by_name
        for i, rule in enumerate(self.rules):
            for var, term in rule.antecedent.items():
                if var not in by_name:
                    raise ValueError(f"rule {i}: unknown variable {var!r}")
                if term not in by_name[var].terms:
                    raise ValueError(f"rule {i}: variable {var!r} has no term {term!r}")
            if rule.consequent not in self.output_labels:
                raise ValueError(f"rule {i}: unknown output {rule.consequent!r}")

    @property
    def by_name(self):
        return {v.name: v for v in self.variables}

    def referenced_variables(self):
        return sorted({var for r in self.rules for var in r.antecedent})


def _decide(system, activations):
    # first label in tie_break order that reaches the maximum
    best = max(activations.values())
    if best <= 0.0:
        raise NoRuleFiredError("no rule fired: every output activation is 0")
    return next(label for label in system.tie_break if activations[label] == best)


def infer(system, crisp_inputs):
    """Returns ``(label, activations)`` with one activation per output label."""
    by_name = system.by_name
    needed = system.referenced_variables()
    missing = [v for v in needed if v not in crisp_inputs]
    if missing:
        raise KeyError(f"missing crisp inputs for {missing}")
    fuzzified = {name: fuzzify(by_name[name], crisp_inputs[name]) for name in needed}
    activations = {label: 0.0 for label in system.output_labels}
    for rule in system.rules:
        w = fire_rule(rule, fuzzified)
        if w > activations[rule.consequent]:
            activations[rule.consequent] = w
    return _decide(system, activations), activations


def infer_batch(system, crisp_inputs):
    """Vectorised :func:`infer` over equally shaped input arrays.

    Returns ``(label_index, activations)`` where ``label_index`` indexes
    ``system.output_labels`` (-1 where no rule fired) and ``activations``
    has a trailing axis over the output labels.
    """
    by_name = system.by_name
    degrees = {}
    for name in system.referenced_variables():
        var = by_name[name]
        x = np.clip(np.asarray(crisp_inputs[name], dtype=np.float64), *var.universe)
        degrees[name] = {t: eval_membership_array(mf, x) for t, mf in var.terms.items()}
    shape = np.broadcast(*(next(iter(d.values())) for d in degrees.values())).shape
    labels = system.output_labels
    acts = np.zeros(shape + (len(labels),))
    for rule in system.rules:
        terms = [degrees[v][t] for v, t in rule.antecedent.items()]
        w = terms[0]
        for t in terms[1:]:
            w = np.minimum(w, t)
        k = labels.index(rule.consequent)
        np.maximum(acts[..., k], w, out=acts[..., k])
    order = [labels.index(label) for label in system.tie_break]
    pick = np.argmax(acts[..., order], axis=-1)
    index = np.asarray(order)[pick]
    index = np.where(acts.max(axis=-1) > 0, index, -1)
    return index, acts


def system_to_dict(system):
    return {
        "variables": [
            {"name": v.name, "universe": list(v.universe),
             "terms": {label: list(mf.breakpoints) for label, mf in v.terms.items()}}
            for v in system.variables
        ],
        "outputs": list(system.output_labels),
        "tie_break": list(system.tie_break),
        "rules": [{"if": dict(r.antecedent), "then": r.consequent} for r in system.rules],
    }


def system_from_dict(doc):
    try:
        variables = [FuzzyVariable(v["name"], tuple(v["universe"]), v["terms"]) for v in doc["variables"]]
        rules = [FuzzyRule(r["if"], r["then"]) for r in doc["rules"]]
        return FuzzySystem(variables, doc["outputs"], rules, doc.get("tie_break"))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed fuzzy system document: {exc}") from None


def dump_system(system, path):
    with open(path, "w") as fh:
        json.dump(system_to_dict(system), fh, indent=2)
        fh.write("\n")


def load_system(path):
    with open(path) as fh:
        return system_from_dict(json.load(fh))
