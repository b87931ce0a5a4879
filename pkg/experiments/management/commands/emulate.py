from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from experiments.config import KINDS, load_config_file, parse_config
from experiments.runner import execute
from experiments.writers import format_for_path, render, write_atomic
from mean_field.exceptions import EmulationError

EXIT_CONFIG = 1
EXIT_IO = 4

HELP_TEXT = {
    'brillouin': 'Tabulate B_S(y) next to the S = 3/2 closed form',
    'curve': 'Second-order magnetization curves written into the register',
    'hysteresis': 'Heating and cooling branches of the first-order model',
    'critical-field': 'Smallest field at which the magnetization jump disappears',
    'angle-table': 'Certified pulse angles for every temperature',
    'roundtrip': 'Write, read back and compare magnetizations',
}

# flag destination -> RunConfig field
FLAG_FIELDS = {
    'spin': 'spin', 'g': 'g', 'z': 'z',
    'j_ex': 'j_ex', 'j_ex_kelvin': 'j_ex_kelvin', 'lam': 'lam', 't_c': 't_c',
    'lambda_prime_ratio': 'lambda_prime_ratio',
    'b0': 'b0', 't_min': 't_min', 't_max': 't_max', 'steps': 'steps', 'units': 'units',
    'direction': 'directions', 'epsilon': 'epsilon',
    'temperature': 'temperatures', 'seed': 'branch_seed',
    'b_max': 'b_max', 'b_steps': 'b_steps', 'y_max': 'y_max',
    'out': 'output', 'format': 'format',
}


class Command(BaseCommand):
    help = 'Emulate a mean-field ferromagnet on a two-qubit register and write the results'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='kind', required=True, metavar='{' + ','.join(KINDS) + '}')
        for kind in KINDS:
            subparser = subparsers.add_parser(kind, help=HELP_TEXT[kind])
            self._add_common_arguments(subparser)
            if kind == 'brillouin':
                subparser.add_argument('--y-max', type=float, help='Largest Brillouin argument (default 10)')
            if kind == 'critical-field':
                subparser.add_argument('--b-max', type=float, help='Largest field scanned, tesla (default 30)')
                subparser.add_argument('--b-steps', type=int, help='Number of fields scanned (default 31)')
            if kind == 'angle-table':
                subparser.add_argument('--direction', action='append', choices=('up', 'down'),
                                       help='Sweep direction; repeat for both (default up and down)')
            if kind == 'roundtrip':
                subparser.add_argument('--temperature', action='append', type=float,
                                       help='Temperature in kelvin; repeat for several (default: the grid)')
                subparser.add_argument('--seed', type=float, help='Initial magnetization selecting the branch')

    def _add_common_arguments(self, parser):
        parser.add_argument('--config', help='JSON config file; flags override its values')

        material = parser.add_argument_group('material')
        material.add_argument('--spin', type=float, help='Spin quantum number (default 3/2)')
        material.add_argument('--g', type=float, help='Landé factor (default 2)')
        material.add_argument('--z', type=int, help='Number of first neighbours (default 6)')
        material.add_argument('--j-ex', type=float, help='Exchange energy, joule')
        material.add_argument('--j-ex-kelvin', type=float, help='Exchange energy over k_B, kelvin')
        material.add_argument('--lambda', dest='lam', type=float, help='Mean-field parameter λ, T/(J/T)')
        material.add_argument('--t-c', type=float, help='Critical temperature to calibrate J_ex to (default 83 K)')
        material.add_argument('--lambda-prime-ratio', type=float, help="λ'/λ in reduced units")

        grid = parser.add_argument_group('grid')
        grid.add_argument('--b0', action='append', type=float, help='Applied field, tesla; repeat for several')
        grid.add_argument('--t-min', type=float, help='Lowest temperature of the grid')
        grid.add_argument('--t-max', type=float, help='Highest temperature of the grid (default 2 T_c)')
        grid.add_argument('--steps', type=int, help='Number of grid points')
        grid.add_argument('--units', choices=('reduced', 'kelvin'), help='Units of t-min/t-max (default reduced)')

        output = parser.add_argument_group('output')
        output.add_argument('--epsilon', type=float, help='Pseudo-pure purity ε')
        output.add_argument('--out', help='Output file; stdout when omitted')
        output.add_argument('--format', choices=('csv', 'json', 'excel'), help='Output format (default from the file suffix)')

    def handle(self, *args, **options):
        kind = options['kind']
        overrides = {field: options.get(flag) for flag, field in FLAG_FIELDS.items()}

        try:
            if options.get('out') and not options.get('format'):
                overrides['format'] = self._format_from_suffix(options['out'], options.get('config'))
            config = parse_config(kind, options.get('config'), overrides)
            records, columns = execute(config)
            content = render(records, config.format, columns)

            if config.output:
                target = self._resolve(config.output)
                write_atomic(target, content)
                self.stderr.write(f"{kind}: {len(records)} records written to {target}")
            elif config.format == 'excel':
                raise CommandError('Excel output needs --out', returncode=EXIT_CONFIG)
            else:
                self.stdout.write(content.decode('utf-8'), ending='')

        except ValidationError as exc:
            raise CommandError(f"invalid configuration: {exc.detail}", returncode=EXIT_CONFIG)
        except EmulationError as exc:
            raise CommandError(f"{type(exc).__name__}: {exc}", returncode=exc.exit_code)
        except OSError as exc:
            raise CommandError(f"I/O failure: {exc}", returncode=EXIT_IO)

    def _format_from_suffix(self, output, config_file):
        """
        Format implied by the --out suffix, or None for an unknown suffix.
        The suffix wins over a config-file format, with a warning when they differ.
        """
        implied = format_for_path(output, None)
        if implied is None or not config_file:
            return implied
        configured = load_config_file(config_file).get('format')
        if configured is not None and configured != implied:
            self.stderr.write(
                f"warning: {output} implies {implied} output but {config_file} sets format {configured!r}; "
                f"writing {implied}. Pass --format to choose explicitly."
            )
        return implied

    def _resolve(self, output):
        path = Path(output)
        base = settings.FERRO_EMULATOR['OUTPUT_DIR']
        if base and not path.is_absolute():
            path = Path(base) / path
        return path
