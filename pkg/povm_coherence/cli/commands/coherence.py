import argparse

from core.utils.registry import register_command
from povm_coherence.cli.command import Command
from povm_coherence.measures.coherence import c_rel_povm, is_povm_incoherent


@register_command
class CoherenceCommand(Command):
    name = "coherence"
    help = "Relative entropy of POVM-based coherence of a state"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("povm", help="POVM JSON file or built-in name")
        parser.add_argument("state", help="State JSON file")

    def run(self, args: argparse.Namespace) -> int:
        p = self.load_povm(args.povm)
        rho = self.load_state(args.state)
        report = c_rel_povm(rho, p)
        incoherent = is_povm_incoherent(rho, p, self.config.incoherence_tol)
        self.emit({**report.to_dict(), "incoherent": incoherent.incoherent,
                   "incoherence_residual": incoherent.max_residual})
        return 0
