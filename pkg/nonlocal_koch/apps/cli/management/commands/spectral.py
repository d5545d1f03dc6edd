from ...commands import ConfigCommand
from ...serializers import SPECTRAL, SpectralConfigSerializer
from ...utils import run_spectral


class Command(ConfigCommand):
    help = 'Solve a nonlocal problem by eigenfunction expansion or convolution.'
    command = SPECTRAL
    serializer_class = SpectralConfigSerializer

    def run(self, config, hashed, threads):
        return run_spectral(config, hashed)
