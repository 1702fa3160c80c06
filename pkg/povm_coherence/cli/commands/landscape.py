import argparse
import sys
from pathlib import Path

from core.logging.logging import Logger
from core.utils.registry import register_command
from povm_coherence.cli.command import Command
from povm_coherence.enums.output import LandscapeMode, OutputFormat, convert_to_landscape_mode
from povm_coherence.errors import ValidationError
from povm_coherence.naimark.construction import build_extension
from povm_coherence.trine.landscape import (
    SphereGrid, coherence_landscape, conversion_landscape, render_landscape, write_landscape,
)


@register_command
class LandscapeCommand(Command):
    name = "landscape"
    help = "Coherence or conversion-fidelity landscape over pure qubit states"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("povm", nargs="?", default="trine", help="POVM JSON file or built-in name")
        parser.add_argument("--mode", default=LandscapeMode.COHERENCE.value,
                            choices=[m.value for m in LandscapeMode])
        parser.add_argument("--state", default=None, help="Initial state JSON (conversion mode)")

    def run(self, args: argparse.Namespace) -> int:
        p = self.load_povm(args.povm)
        grid = SphereGrid.parse(self.config.grid)
        mode = convert_to_landscape_mode(args.mode)
        if mode == LandscapeMode.COHERENCE:
            samples = coherence_landscape(grid, p, threads=self.config.threads)
        else:
            if not args.state:
                raise ValidationError("Conversion landscapes need --state")
            x = build_extension(p, self.config.kind)
            samples = conversion_landscape(self.load_state(args.state), grid, x=x, threads=self.config.threads,
                                           tol=self.config.solver_tol, max_iters=self.config.max_iters)

        if args.out:
            suffix = Path(args.out).suffix.lstrip(".").lower()
            fmt = suffix if suffix in {f.value for f in OutputFormat} else self.config.output_format
            path = write_landscape(samples, args.out, fmt)
            self.emit({"mode": str(mode), "grid": str(grid), "points": len(samples),
                       "unsolved": sum(not s.solved for s in samples), "out": str(path)})
        else:
            Logger.debug("No --out given; writing landscape to stdout")
            sys.stdout.write(render_landscape(samples, self.config.output_format))
        return 0
