"""Run the acceptance criteria outside pytest, one line per criterion."""
import pathlib
import runpy
import sys

root = pathlib.Path(__file__).resolve().parents[1]
sys.path.insert(0, str(root / "tests"))
runpy.run_path(str(root / "tests" / "test_acceptance.py"), run_name="__main__")
