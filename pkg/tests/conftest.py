import pytest

# symbolic tokens for hand-traced examples
A, B, C = 0, 1, 2
ABACABABA = [A, B, A, C, A, B, A, B, A]
ABACABABA_FAILURE = [-1, 0, -1, 1, -1, 0, -1, 3, -1]


@pytest.fixture
def abacababa():
    from kmpbias import compile_pattern

    return compile_pattern(ABACABABA)


# acceptance criteria report one line each at the end of the run
_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])
