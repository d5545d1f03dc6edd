from ...commands import ConfigCommand
from ...serializers import KOCH, KochConfigSerializer
from ...utils import run_koch


class Command(ConfigCommand):
    help = 'Build a Koch prefractal domain and write its JSON descriptor and SVG.'
    command = KOCH
    serializer_class = KochConfigSerializer

    def run(self, config, hashed, threads):
        return run_koch(config, hashed)
