"""Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

import contextlib

RESULTS = {}


@contextlib.contextmanager
def criterion(number, title):
    """Record PASS if the block completes, FAIL (and re-raise) otherwise; ``rec['detail']`` is free text."""
    rec = {"detail": ""}
    try:
        yield rec
    except BaseException as exc:
        msg = str(exc).strip()
        reason = msg.splitlines()[0] if msg else type(exc).__name__
        RESULTS[number] = ("FAIL", title, rec["detail"] or reason)
        print(format_line(number))
        raise
    RESULTS[number] = ("PASS", title, rec["detail"])
    print(format_line(number))


def format_line(number):
    status, title, detail = RESULTS[number]
    return f"{status} criterion {number}: {title}" + (f" | {detail}" if detail else "")


def lines():
    return [format_line(k) for k in sorted(RESULTS)]
