import argparse

from core.utils.registry import register_command
from povm_coherence.cli.command import Command
from povm_coherence.enums.sdp_status import ChannelClass
from povm_coherence.naimark.construction import build_extension
from povm_coherence.sdp.fidelity import fmax


@register_command
class FmaxCommand(Command):
    name = "fmax"
    help = "Maximal fidelity of converting rho to sigma with POVM-incoherent channels"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("povm", help="POVM JSON file or built-in name")
        parser.add_argument("rho", help="Initial state JSON file")
        parser.add_argument("sigma", help="Target state JSON file")
        parser.add_argument("--channels", choices=[c.value for c in ChannelClass], default=ChannelClass.PIC.value,
                            help="Optimize over POVM-incoherent (pic) or all subspace-keeping (cptp) channels")

    def run(self, args: argparse.Namespace) -> int:
        p = self.load_povm(args.povm)
        rho, sigma = self.load_state(args.rho), self.load_state(args.sigma)
        x = build_extension(p, self.config.kind)
        result = fmax(rho, sigma, x, mode=ChannelClass(args.channels),
                      tol=self.config.solver_tol, max_iters=self.config.max_iters)
        self.emit(result.to_dict())
        return 0
