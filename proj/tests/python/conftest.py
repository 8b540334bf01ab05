import json
import os
import subprocess
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def cli():
    path = os.environ.get("TAYLORLAW_CLI", str(ROOT / "build" / "taylorlaw"))
    if not Path(path).exists():
        pytest.skip(f"CLI not built at {path}")

    def run(*args, check=True, env=None):
        proc = subprocess.run([path, *map(str, args)], capture_output=True, text=True,
                              env={**os.environ, **(env or {})})
        if check and proc.returncode != 0:
            raise AssertionError(f"exit {proc.returncode}: {proc.stderr}")
        return proc

    return run


@pytest.fixture(scope="session")
def schemas():
    directory = Path(os.environ.get("TAYLORLAW_SCHEMAS", ROOT / "schemas"))
    return {p.name.split(".")[0]: json.loads(p.read_text()) for p in directory.glob("*.schema.json")}
