"""Registry for acceptance-criterion outcomes, printed by the
pytest_terminal_summary hook in conftest."""

RESULTS: dict[int, str] = {}

TOTAL = 10


def record(number: int, text: str) -> None:
    RESULTS[number] = text


def summary_lines() -> list[str]:
    lines = []
    for number in range(1, TOTAL + 1):
        if number in RESULTS:
            lines.append(f"ACCEPTANCE {number:2d}: PASS — {RESULTS[number]}")
        else:
            lines.append(f"ACCEPTANCE {number:2d}: FAIL — criterion did not complete")
    return lines
