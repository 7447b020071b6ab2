"""JSON wire formats for instances, matchings and verdict reports."""

from __future__ import annotations

import json
from typing import Any, Mapping

import numpy as np

from .model import (
    DisjointCoverViolation,
    IncompletePreferences,
    Instance,
    InstanceError,
    Matching,
    NegativeQuota,
    UnknownAgentReference,
)


class MatchingFormatError(ValueError):
    """A matching document is malformed or names unknown agents."""


def _flag(value: Any, where: str) -> int:
    if value in (0, 1) and not isinstance(value, float):
        return int(value)
    raise InstanceError(f"{where}: preference must be 0 or 1, got {value!r}")


def _names(raw: Mapping, key: str) -> list[str]:
    items = raw.get(key)
    if not isinstance(items, list) or not all(isinstance(x, str) for x in items):
        raise InstanceError(f"{key!r} must be an array of strings")
    return items


def _table(
    rows: Any, outer: list[str], inner: list[str], key: str, outer_index=None
) -> np.ndarray:
    """Read a complete ``outer -> inner -> 0/1`` object into an array."""
    if not isinstance(rows, Mapping):
        raise InstanceError(f"{key!r} must be an object")
    outer_pos = {name: i for i, name in enumerate(outer)}
    inner_pos = {name: j for j, name in enumerate(inner)}
    for name in rows:
        if name not in outer_pos:
            raise UnknownAgentReference(f"{key}: unknown agent {name!r}")
    out = np.zeros((len(outer), len(inner)), dtype=np.uint8)
    for i, name in enumerate(outer):
        if name not in rows:
            raise IncompletePreferences(f"{key}: no entry for {name!r}")
        row = rows[name]
        if not isinstance(row, Mapping):
            raise InstanceError(f"{key}.{name} must be an object")
        for other in row:
            if other not in inner_pos:
                raise UnknownAgentReference(f"{key}.{name}: unknown agent {other!r}")
        for j, other in enumerate(inner):
            if other not in row:
                raise IncompletePreferences(f"{key}.{name}: missing {other!r}")
            out[i, j] = _flag(row[other], f"{key}.{name}.{other}")
    return out


def validate_instance(raw: Mapping[str, Any]) -> Instance:
    """Turn a parsed instance document into a validated :class:`Instance`.

    Agent order follows the ``applicants`` / ``employers`` arrays.
    """
    if not isinstance(raw, Mapping):
        raise InstanceError("instance document must be a JSON object")
    applicants = _names(raw, "applicants")
    employers = _names(raw, "employers")
    everyone = applicants + employers
    if len(set(everyone)) != len(everyone):
        raise InstanceError("agent names must be unique across both sides")
    a_pos = {name: i for i, name in enumerate(applicants)}
    e_pos = {name: j for j, name in enumerate(employers)}

    affiliation = raw.get("affiliation")
    if not isinstance(affiliation, Mapping):
        raise InstanceError("'affiliation' must be an object")
    owner: list[int | None] = [None] * len(applicants)
    for e_name, members in affiliation.items():
        if e_name not in e_pos:
            raise UnknownAgentReference(f"affiliation: unknown employer {e_name!r}")
        if not isinstance(members, list):
            raise InstanceError(f"affiliation.{e_name} must be an array")
        for a_name in members:
            if a_name not in a_pos:
                raise UnknownAgentReference(f"affiliation.{e_name}: unknown applicant {a_name!r}")
            a = a_pos[a_name]
            if owner[a] is not None:
                raise DisjointCoverViolation(f"applicant {a_name!r} has two affiliations")
            owner[a] = e_pos[e_name]
    for a, e in enumerate(owner):
        if e is None:
            raise DisjointCoverViolation(f"applicant {applicants[a]!r} has no affiliation")

    quota = raw.get("quota")
    if not isinstance(quota, Mapping):
        raise InstanceError("'quota' must be an object")
    for name in quota:
        if name not in a_pos and name not in e_pos:
            raise UnknownAgentReference(f"quota: unknown agent {name!r}")
    quotas = []
    for name in everyone:
        if name not in quota:
            raise IncompletePreferences(f"quota: missing {name!r}")
        q = quota[name]
        if not isinstance(q, int) or isinstance(q, bool):
            raise InstanceError(f"quota.{name} must be an integer")
        if q < 0:
            raise NegativeQuota(f"quota.{name} is negative")
        quotas.append(q)

    pref_a = _table(raw.get("pref_applicant"), applicants, employers, "pref_applicant")
    pref_e = _table(raw.get("pref_employer_own"), employers, applicants, "pref_employer_own")

    nested = raw.get("pref_employer_affiliate")
    if not isinstance(nested, Mapping):
        raise InstanceError("'pref_employer_affiliate' must be an object")
    for e_name, per_aff in nested.items():
        if e_name not in e_pos:
            raise UnknownAgentReference(f"pref_employer_affiliate: unknown employer {e_name!r}")
        if not isinstance(per_aff, Mapping):
            raise InstanceError(f"pref_employer_affiliate.{e_name} must be an object")
        for a_name in per_aff:
            if a_name not in a_pos or owner[a_pos[a_name]] != e_pos[e_name]:
                raise UnknownAgentReference(
                    f"pref_employer_affiliate.{e_name}: {a_name!r} is not its affiliate"
                )
    pref_aff = np.zeros((len(applicants), len(employers)), dtype=np.uint8)
    for a, a_name in enumerate(applicants):
        e_name = employers[owner[a]]
        rows = nested.get(e_name, {})
        if a_name not in rows:
            raise IncompletePreferences(f"pref_employer_affiliate.{e_name}: missing {a_name!r}")
        pref_aff[a] = _table({a_name: rows[a_name]}, [a_name], employers,
                             f"pref_employer_affiliate.{e_name}")[0]

    meta = raw.get("meta")
    return Instance.build(
        owner=owner,
        applicant_quota=quotas[: len(applicants)],
        employer_quota=quotas[len(applicants):],
        pref_applicant=pref_a,
        pref_employer_own=pref_e,
        pref_affiliate=pref_aff,
        applicant_names=applicants,
        employer_names=employers,
        meta=dict(meta) if isinstance(meta, Mapping) else None,
    )


def instance_to_dict(inst: Instance) -> dict[str, Any]:
    A, E = inst.applicant_names, inst.employer_names
    pa, pe, paff = inst.pa, inst.pe, inst.paff
    doc: dict[str, Any] = {
        "applicants": list(A),
        "employers": list(E),
        "affiliation": {E[e]: [A[a] for a in sorted(inst.affiliation[e])] for e in range(inst.m)},
        "quota": {
            **{A[a]: inst.applicant_quota[a] for a in range(inst.n)},
            **{E[e]: inst.employer_quota[e] for e in range(inst.m)},
        },
        "pref_applicant": {A[a]: {E[e]: pa[a][e] for e in range(inst.m)} for a in range(inst.n)},
        "pref_employer_own": {E[e]: {A[a]: pe[e][a] for a in range(inst.n)} for e in range(inst.m)},
        "pref_employer_affiliate": {
            E[e]: {A[a]: {E[x]: paff[a][x] for x in range(inst.m)} for a in sorted(inst.affiliation[e])}
            for e in range(inst.m)
        },
    }
    if inst.meta is not None:
        doc["meta"] = dict(inst.meta)
    return doc


def dumps_instance(inst: Instance) -> str:
    return json.dumps(instance_to_dict(inst), indent=1, ensure_ascii=False) + "\n"


def loads_instance(text: str) -> Instance:
    return validate_instance(json.loads(text))


def matching_to_dict(inst: Instance, mu: Matching) -> dict[str, Any]:
    A, E = inst.applicant_names, inst.employer_names
    return {"matches": [[A[a], E[e]] for a, e in mu.sorted_pairs()]}


def matching_from_dict(inst: Instance, doc: Any) -> Matching:
    if not isinstance(doc, Mapping) or not isinstance(doc.get("matches"), list):
        raise MatchingFormatError("matching document needs a 'matches' array")
    a_pos = {name: i for i, name in enumerate(inst.applicant_names)}
    e_pos = {name: j for j, name in enumerate(inst.employer_names)}
    pairs = []
    for item in doc["matches"]:
        if not (isinstance(item, list) and len(item) == 2):
            raise MatchingFormatError(f"match entry must be [applicant, employer]: {item!r}")
        a_name, e_name = item
        if a_name not in a_pos or e_name not in e_pos:
            raise MatchingFormatError(f"unknown agent in match {item!r}")
        pairs.append((a_pos[a_name], e_pos[e_name]))
    if len(set(pairs)) != len(pairs):
        raise MatchingFormatError("duplicate pair in matching")
    return Matching.of(pairs)


def loads_matching(inst: Instance, text: str) -> Matching:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatchingFormatError(str(exc)) from exc
    return matching_from_dict(inst, doc)


def verdict_to_dict(inst: Instance, lam, witness, mu_prime: Matching | None) -> dict[str, Any]:
    """Verifier result; ``witness`` is a blocking tuple or ``None``, empty slots become null."""
    doc: dict[str, Any] = {"stable": witness is None, "lambda": str(lam), "witness": None, "mu_prime": None}
    if witness is not None:
        keys = ("a", "a_prime", "a_dprime", "e", "e_prime", "e_dprime")
        doc["witness"] = dict(zip(keys, witness.label(inst)))
        doc["mu_prime"] = matching_to_dict(inst, mu_prime)
    return doc
