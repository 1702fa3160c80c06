import argparse

from core.utils.registry import register_command
from povm_coherence.cli.command import Command
from povm_coherence.naimark.construction import build_extension
from povm_coherence.naimark.extension import validate_extension


@register_command
class NaimarkCommand(Command):
    name = "naimark"
    help = "Build a minimal or canonical Naimark extension"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("povm", help="POVM JSON file or built-in name")

    def run(self, args: argparse.Namespace) -> int:
        p = self.load_povm(args.povm)
        x = build_extension(p, self.config.kind)
        diagnostics = validate_extension(x, p, self.config.tol)
        self.emit({**x.to_dict(), "diagnostics": diagnostics.to_dict()})
        return 0
