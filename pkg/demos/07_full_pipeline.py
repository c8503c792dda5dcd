"""Run the full CLI pipeline end to end on the bundled fixture corpus."""

import json
import shutil
import tempfile
from pathlib import Path

from metric_audit.cli import main

fixtures = Path(__file__).parent.parent / "tests" / "fixtures"
workdir = Path(tempfile.mkdtemp(prefix="metric_audit_demo_"))
for name in ("prompts.jsonl", "images.jsonl", "questions.jsonl", "answers.jsonl",
             "similarities.jsonl", "concreteness.tsv", "imageability.tsv",
             "classes.txt", "config.json"):
    shutil.copy(fixtures / name, workdir / name)

config = str(workdir / "config.json")
out = workdir / "out"

# props -> score -> correlate -> matrix -> audit -> report, one call.
code = main(["all", "--config", config, "--out", str(out), "--svg"])
print("exit code:", code)

print("\noutput tree:")
for path in sorted(out.rglob("*")):
    if path.is_file():
        print(" ", path.relative_to(out))

shortcuts = json.loads((out / "shortcuts.json").read_text())
print("\nrubric:")
for row in shortcuts["rubric"]:
    print(f"  {row['metric']:10} text={row['sensitive_to_text']:5} "
          f"image={row['sensitive_to_image']:5} shortcuts={row['robust_to_shortcuts']}")
