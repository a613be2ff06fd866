"""Shared record of acceptance-criterion outcomes, printed at the end of the run."""

RESULTS: dict[int, str] = {}


def record(k: int, ok: bool, detail: str, seconds: float) -> str:
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({seconds:.2f} s) {detail}"
    RESULTS[k] = line
    print(line)
    return line
