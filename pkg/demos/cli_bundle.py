"""
Saving a bundle and driving the command line
============================================

Writes a system bundle to a temporary directory and runs the ``blockcert``
verbs on it in-process.
"""

import tempfile
from pathlib import Path

from blockcert.bundle import save_system
from blockcert.catalog import two_block_system
from blockcert.cli import main

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "two_block.json"
    save_system(two_block_system(1, 1), path, "two-block example")
    for argv in (["compare", path, "--text"],
                 ["certify", path, "--text", "--no-norm"],
                 ["norm", path, "--text"],
                 ["tests", path, "--text"]):
        print("$ blockcert", " ".join(str(a) if a != path else path.name for a in argv))
        code = main([str(a) for a in argv])
        print(f"(exit {code})\n")
