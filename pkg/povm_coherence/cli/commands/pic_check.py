import argparse

from core.utils.json_utils import load_json_as
from core.utils.registry import register_command
from povm_coherence.cli.command import Command, existing_file
from povm_coherence.naimark.construction import build_extension
from povm_coherence.sdp.pic import pic_feasibility
from povm_coherence.superop.representations import KrausChannel


@register_command
class PicCheckCommand(Command):
    name = "pic-check"
    aliases = ["pic"]
    help = "Decide whether a channel is POVM-incoherent"

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("povm", help="POVM JSON file or built-in name")
        parser.add_argument("channel", help="Channel JSON file with a 'kraus' list")
        parser.add_argument("--include-choi", action="store_true", help="Print the certifying Choi matrix")

    def run(self, args: argparse.Namespace) -> int:
        p = self.load_povm(args.povm)
        channel = load_json_as(existing_file(args.channel, "channel"), KrausChannel.from_dict)
        x = build_extension(p, self.config.kind)
        verdict = pic_feasibility(channel, x, feas_threshold=self.config.feas_threshold,
                                  tol=self.config.solver_tol, max_iters=self.config.max_iters)
        self.emit({**verdict.to_dict(include_choi=args.include_choi), "kind": str(x.kind), "d_prime": x.d_prime})
        return 0
