"""Uniform pass/fail records shared by every verification stage."""

from __future__ import annotations


def check(cid: str, got, expected, stage: str) -> dict:
    """One comparison, JSON-ready.  Equality is exact; no tolerances."""
    return {
        "id": cid,
        "stage": stage,
        "status": "pass" if got == expected else "fail",
        "value": got,
        "expected": expected,
    }


def note(cid: str, value, stage: str, status: str = "pass") -> dict:
    """A recorded value with an externally decided status (e.g. 'skipped')."""
    return {"id": cid, "stage": stage, "status": status, "value": value, "expected": None}


def all_pass(checks: list[dict]) -> bool:
    return all(c["status"] == "pass" for c in checks)
