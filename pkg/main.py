import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

from commands import COMMANDS
from utils.errors import EoAttnError
from utils.run_config import RunConfig

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = 'EOATTN_OUTPUT_DIR'
DEFAULT_OUTPUT_DIR = './results'
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

EXIT_OK = 0
EXIT_USER_ERROR = 1


# ---------------------------------------------------------
# Helper for tick/cross status lines
# ---------------------------------------------------------
def format_status(ok: bool, message: str = ""):
    """Return ✓ or ✗ with clean message."""
    if ok:
        return f"✓ {message}"
    return f"✗ {message}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='eoattn',
        description='Electro-optic attention nonlinearities: calibration, evaluation, '
                    'training, sweeps, hardware model and trace processing',
    )
    parser.add_argument('command', choices=sorted(COMMANDS), help='subcommand to run')
    parser.add_argument('--config', help='run config (INI); defaults apply when omitted')
    parser.add_argument('--seed', type=int, help='override [run] seed')
    parser.add_argument('--out', help=f'output directory (overrides ${OUTPUT_DIR_ENV} and [run] out_dir)')
    parser.add_argument('--svg-timestamp', action='store_true', help='embed creation dates in SVG figures')
    parser.add_argument('-v', '--verbose', action='store_true', help='DEBUG logging')
    return parser


def load_configuration(args: argparse.Namespace) -> RunConfig:
    """Run config from file plus command-line overrides"""
    config = RunConfig.from_file(args.config) if args.config else RunConfig(source='<defaults>')
    if args.seed is not None:
        config.set('run', 'seed', args.seed)
    return config


def resolve_output_dir(args: argparse.Namespace, config: RunConfig) -> Path:
    """--out > EOATTN_OUTPUT_DIR > [run] out_dir > ./results"""
    load_dotenv()
    if args.out:
        return Path(args.out)
    env_dir = os.getenv(OUTPUT_DIR_ENV)
    if env_dir:
        return Path(env_dir)
    if config.is_set('run', 'out_dir'):
        return Path(config.get('run', 'out_dir'))
    return Path(DEFAULT_OUTPUT_DIR)


def setup_logging(out_dir: Path, verbose: bool) -> None:
    log_dir = out_dir / 'logs'
    log_dir.mkdir(parents=True, exist_ok=True)
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format=LOG_FORMAT,
        handlers=[
            logging.FileHandler(log_dir / 'eoattn.log', encoding='utf-8'),
            logging.StreamHandler(sys.stdout),
        ],
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_configuration(args)
        out_dir = resolve_output_dir(args, config)
        setup_logging(out_dir, args.verbose)
        logger.info(format_status(True, f"Config: {config.source}"))
        logger.info(format_status(True, f"Output directory: {out_dir}"))

        command = COMMANDS[args.command](config, out_dir, svg_timestamp=args.svg_timestamp)
        result = command.run()
        status = command.get_status()
        logger.info(format_status(result['success'],
                                  f"{status['command']}: {status['artifacts_written']} artifact(s) in {status['out_dir']}"))
        return EXIT_OK if result['success'] else EXIT_USER_ERROR

    except EoAttnError as e:
        logger.debug("Traceback", exc_info=True)
        logger.error(format_status(False, f"{type(e).__name__}: {e}"))
        print(f"eoattn: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except (ValueError, OSError, KeyError) as e:
        logger.debug("Traceback", exc_info=True)
        logger.error(format_status(False, f"{type(e).__name__}: {e}"))
        print(f"eoattn: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USER_ERROR


if __name__ == "__main__":
    sys.exit(main())
