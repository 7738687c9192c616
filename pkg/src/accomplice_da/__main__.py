"""Package entrypoint."""

from __future__ import annotations

from .cli import main

main.main(prog_name="accomplice-da", standalone_mode=True)
