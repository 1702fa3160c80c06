import argparse

from core.utils.registry import register_command
from povm_coherence.cli.command import Command
from povm_coherence.povm.catalog import perturbed, trine_povm
from povm_coherence.trine.suite import run_trine_suite


@register_command
class TrineSuiteCommand(Command):
    name = "trine-suite"
    help = "Check every analytic result of the trine example"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--povm", default=None, help="POVM to check instead of the trine (not pre-validated)")
        parser.add_argument("--perturb", type=float, default=None, metavar="SCALE",
                            help="Scale the first trine effect by SCALE before running")
        parser.add_argument("--quick", action="store_true", help="Skip canonical-extension SDP checks")

    def run(self, args: argparse.Namespace) -> int:
        p = self.load_povm(args.povm, validate=False) if args.povm else None
        if args.perturb is not None:
            p = perturbed(p or trine_povm(), index=0, scale=args.perturb)
        report = run_trine_suite(p, self.config, quick=args.quick)
        self.emit(report.to_dict())
        return 0 if report.passed else 1
