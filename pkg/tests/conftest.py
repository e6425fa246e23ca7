import math
from pathlib import Path

import mpmath
import pytest

ROOT = Path(__file__).resolve().parents[1]
PROBLEMS = ROOT / "problems"
GOLDEN = ROOT / "tests" / "golden"


def mp_ml(a, b, z, digits=30):
    """Scalar Mittag-Leffler series in high precision, independent of the package."""
    # extra digits to absorb cancellation between terms as large as the peak
    peak = max(k * math.log10(abs(z)) - math.lgamma(b + a * k) / math.log(10) if z else 0.0
               for k in range(1, 4000))
    dps = digits + max(0, int(peak) + 1)
    with mpmath.workdps(dps):
        a, b, z = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(z)
        total = mpmath.mpf(0)
        k = 0
        while True:
            term = z ** k * mpmath.rgamma(b + a * k)
            total += term
            if k > 20 and abs(term) < mpmath.mpf(10) ** (-dps + 5) * max(1, abs(total)):
                break
            k += 1
        return float(total)


@pytest.fixture
def problems_dir():
    return PROBLEMS


@pytest.fixture
def golden_dir():
    return GOLDEN


ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def record(request):
    """Log one PASS/FAIL line for an acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE, [])

    def _record(number, title, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number}: {title} | {detail}"
        print(line)
        lines.append(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
