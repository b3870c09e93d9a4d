"""Run the pipeline on the bundled fixture and copy the bundle into tests/golden/.

Only rerun this after deliberately changing pipeline output; the acceptance
suite compares fresh runs against these files byte for byte.

    python3 scripts/freeze_goldens.py
"""

from __future__ import annotations

import shutil
import sys
import tempfile
from pathlib import Path

from civic_pulse import cli
from civic_pulse.report import MANIFEST_JSON

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    golden = ROOT / "tests" / "golden"
    with tempfile.TemporaryDirectory() as tmp:
        status = cli.main(["run", "all", "--config", str(ROOT / "fixtures" / "config.json"), "--out", tmp])
        if status:
            return status
        golden.mkdir(parents=True, exist_ok=True)
        names = sorted(p.name for p in Path(tmp).iterdir() if p.is_file())
        assert MANIFEST_JSON in names
        for name in names:
            shutil.copyfile(Path(tmp) / name, golden / name)
    print(f"froze {len(names)} files into {golden}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
