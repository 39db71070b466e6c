#!/usr/bin/env python3
"""
ncrw launcher: prepares the venv, then runs the acceptance battery.

    python3 run.py              full battery (minutes)
    python3 run.py --quick      small cases only (seconds)
    python3 run.py --tests      unit tests instead of the battery
    python3 run.py --setup      reinstall requirements first
"""

import os
import shutil
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent
MIN_PYTHON = (3, 10)
VENV = ROOT / "venv"
REQUIREMENTS = ROOT / "requirements.txt"
MARKER = VENV / ".deps_installed"
ENV_FILE = ROOT / ".env"
ENV_TEMPLATE = ROOT / ".env.example"

# settings echoed before a run, with the defaults config.py falls back to
SETTINGS = (
    ("NCRW_STEP_LIMIT", "1000000"),
    ("NCRW_MAX_RULES", "500"),
    ("NCRW_PARALLEL", "1"),
    ("NCRW_PHI3_SIGN", "minus"),
)

# ---------------------------------------------------------------------------
# Terminal output
# ---------------------------------------------------------------------------

_COLORS = {"bold": "\033[1m", "green": "\033[92m", "yellow": "\033[93m", "red": "\033[91m", "reset": "\033[0m"}
if sys.platform == "win32" and os.system("") != 0:
    _COLORS = dict.fromkeys(_COLORS, "")


def _say(mark, color, msg):
    print(f"  {_COLORS[color]}{mark}{_COLORS['reset']} {msg}")


def _step(title):
    print(f"\n{_COLORS['bold']}{title}{_COLORS['reset']}")


# ---------------------------------------------------------------------------
# Environment
# ---------------------------------------------------------------------------

def _venv_bin(name):
    if sys.platform == "win32":
        return VENV / "Scripts" / f"{name}.exe"
    return VENV / "bin" / name


def _require_python():
    found = sys.version_info[:2]
    label = ".".join(map(str, found))
    if found < MIN_PYTHON:
        _say("✗", "red", f"need Python {'.'.join(map(str, MIN_PYTHON))} or newer, running {label}")
        sys.exit(1)
    _say("✓", "green", f"Python {label}")


def _stale(force):
    # requirements edited after the last install count as stale
    return force or not MARKER.exists() or REQUIREMENTS.stat().st_mtime > MARKER.stat().st_mtime


def _prepare_venv(force):
    if not _venv_bin("python3" if sys.platform != "win32" else "python").exists():
        subprocess.run([sys.executable, "-m", "venv", str(VENV)], check=True)
        _say("✓", "green", "created venv/")
    if not _stale(force):
        _say("✓", "green", "requirements already installed")
        return
    pip = str(_venv_bin("pip3" if sys.platform != "win32" else "pip"))
    subprocess.run([pip, "install", "-q", "--upgrade", "pip"], check=True)
    subprocess.run([pip, "install", "-q", "-r", str(REQUIREMENTS)], check=True)
    MARKER.touch()
    _say("✓", "green", "installed python-dotenv, sympy, pytest")


def _read_env():
    values = {}
    if ENV_FILE.exists():
        for line in ENV_FILE.read_text().splitlines():
            key, sep, value = line.partition("=")
            if sep and not key.lstrip().startswith("#"):
                values[key.strip()] = value.strip()
    return values


def _prepare_env():
    if not ENV_FILE.exists() and ENV_TEMPLATE.exists():
        shutil.copy(ENV_TEMPLATE, ENV_FILE)
        _say("✓", "green", ".env written from .env.example")
    elif not ENV_FILE.exists():
        _say("!", "yellow", "no .env; built-in defaults apply")
    values = _read_env()
    for name, default in SETTINGS:
        current = os.environ.get(name) or values.get(name) or default
        _say("·", "bold", f"{name}={current}")


# ---------------------------------------------------------------------------
# Runs
# ---------------------------------------------------------------------------

def _launch(cmd, label):
    _step(label)
    try:
        code = subprocess.run(cmd, cwd=ROOT).returncode
    except KeyboardInterrupt:
        _say("!", "yellow", "interrupted")
        return 130
    if code == 0:
        _say("✓", "green", "passed")
    else:
        _say("✗", "red", f"exit code {code}")
    return code


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    python = str(_venv_bin("python3" if sys.platform != "win32" else "python"))

    _step("ncrw: noncommutative rewriting")
    _require_python()
    _prepare_venv(force="--setup" in argv)
    _prepare_env()

    if "--tests" in argv:
        return _launch([python, "-m", "pytest", "-q", "tests"], "Unit tests")
    quick = "--quick" in argv
    cmd = [python, "cli.py", "--text", "paper-suite"] + (["--quick"] if quick else [])
    return _launch(cmd, "Acceptance battery" + (" (quick)" if quick else ""))


if __name__ == "__main__":
    sys.exit(main())
