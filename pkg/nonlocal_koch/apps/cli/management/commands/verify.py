from ...commands import ConfigCommand
from ...serializers import VERIFY, VerifyConfigSerializer
from ...utils import run_verify


class Command(ConfigCommand):
    help = 'Run the analytic identity battery and write a JSON report.'
    command = VERIFY
    serializer_class = VerifyConfigSerializer
    config_required = False

    def run(self, config, hashed, threads):
        return run_verify(config, hashed)

    def failure_message(self, result):
        return '%d of %d checks failed' % (
            result.report['failures'], result.report['count'])
