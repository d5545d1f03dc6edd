from ...commands import ConfigCommand
from ...serializers import COMPARE, CompareConfigSerializer
from ...utils import run_compare


class Command(ConfigCommand):
    help = 'Compare Monte Carlo estimates with deterministic solutions.'
    command = COMPARE
    serializer_class = CompareConfigSerializer

    def run(self, config, hashed, threads):
        return run_compare(config, hashed, threads)
