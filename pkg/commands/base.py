"""
Command base class
Every subcommand gets the run config and an output directory, writes its
artifacts through utils.exporter and leaves its resolved config next to them.
"""

import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List

import pandas as pd

from utils.exporter import write_dataframe, write_text
from utils.figures import FigureSpec, save_figure
from utils.run_config import RunConfig

logger = logging.getLogger(__name__)

RUN_CONFIG_FILENAME = 'run_config.ini'


class Command:
    """Base for the eoattn subcommands"""

    name = 'command'

    def __init__(self, config: RunConfig, out_dir: Path, svg_timestamp: bool = False):
        """
        Args:
            config: validated run config
            out_dir: directory receiving every artifact of this run
            svg_timestamp: embed creation dates in SVG figures
        """
        self.config = config
        self.out_dir = Path(out_dir)
        self.svg_timestamp = svg_timestamp
        self.artifacts: List[Dict[str, Any]] = []

    @property
    def seed(self) -> int:
        return self.config.seed

    def execute(self) -> Dict[str, Any]:
        raise NotImplementedError

    def run(self) -> Dict[str, Any]:
        """
        Execute the command and write its resolved config

        Returns:
            Result dictionary: success flag, command name, artifacts written,
            command-specific fields and a timestamp
        """
        logger.info("=" * 80)
        logger.info(f"STARTING {self.name.upper()}")
        logger.info("=" * 80)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.write_text(self.config.to_text(), RUN_CONFIG_FILENAME)

        details = self.execute()
        result = {
            'success': all(a.get('success', False) for a in self.artifacts),
            'command': self.name,
            'out_dir': str(self.out_dir),
            'artifacts': [a['filepath'] for a in self.artifacts],
            'timestamp': datetime.now().isoformat(),
        }
        result.update(details)
        logger.info(f"✓ {self.name} finished: {len(self.artifacts)} artifact(s) in {self.out_dir}")
        return result

    def _record(self, response: Dict[str, Any]) -> Dict[str, Any]:
        self.artifacts.append(response)
        return response

    def write_csv(self, frame: pd.DataFrame, filename: str) -> Dict[str, Any]:
        return self._record(write_dataframe(frame, self.out_dir / filename))

    def write_text(self, text: str, filename: str) -> Dict[str, Any]:
        return self._record(write_text(text, self.out_dir / filename))

    def write_figure(self, spec: FigureSpec, frame: pd.DataFrame, filename: str) -> Dict[str, Any]:
        return self._record(save_figure(spec, frame, self.out_dir / filename, self.svg_timestamp))

    def record(self, response: Dict[str, Any]) -> Dict[str, Any]:
        """Register an artifact written by a module-level save function"""
        return self._record(response)

    def get_status(self) -> Dict[str, Any]:
        return {
            'command': self.name,
            'out_dir': str(self.out_dir),
            'artifacts_written': len(self.artifacts),
        }
