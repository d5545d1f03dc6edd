from ...commands import ConfigCommand
from ...serializers import WALK, WalkConfigSerializer
from ...utils import run_walk


class Command(ConfigCommand):
    help = 'Run Monte Carlo walkers and write CSV statistics.'
    command = WALK
    serializer_class = WalkConfigSerializer

    def run(self, config, hashed, threads):
        return run_walk(config, hashed, threads)
