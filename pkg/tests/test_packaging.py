import re
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def _requirements(name):
    lines = (ROOT / name).read_text().splitlines()
    return {re.split(r"[<>=!~]", line.strip())[0]: line.strip() for line in lines if line.strip() and not line.startswith("#")}


def test_setup_installs_the_runtime_requirements():
    setup_text = (ROOT / "setup.py").read_text()
    assert "open('requirements_minimal.txt')" in setup_text
    runtime = _requirements("requirements_minimal.txt")
    assert set(runtime) == {"numpy", "pandas", "pyyaml", "python-dotenv", "joblib"}


def test_full_requirements_add_only_test_packages():
    runtime = _requirements("requirements_minimal.txt")
    full = _requirements("requirements.txt")
    assert {name: full[name] for name in runtime} == runtime
    assert set(full) - set(runtime) == {"pytest", "pytest-cov", "sympy"}
    setup_text = (ROOT / "setup.py").read_text()
    for name in set(full) - set(runtime):
        assert f'"{full[name]}"' in setup_text
