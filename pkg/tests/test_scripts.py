import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


@pytest.mark.parametrize("name, argv", [
    ("convergence_table.py", ["--n", "10,100"]),
    ("ks_sweep.py", ["--paths", "1000"]),
    ("fdd_oracle.py", ["--paths", "5000", "--cells", "200"]),
    ("regvar_limit.py", ["--n", "1e3"]),
])
def test_script_runs(name, argv):
    proc = subprocess.run([sys.executable, str(SCRIPTS / name), *argv],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip()
