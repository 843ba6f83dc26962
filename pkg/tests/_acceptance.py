"""Registry for the per-criterion pass/fail lines."""

RESULTS = {}


def report(n: int, ok: bool, detail: str) -> bool:
    RESULTS[n] = (bool(ok), detail)
    print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return bool(ok)
