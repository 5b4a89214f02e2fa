# commands/__init__.py
from .base import Command
from .calibrate import CalibrateCommand
from .evaluate import EvalCommand
from .train import TrainCommand
from .sweep import SweepCommand
from .hwmodel import HwModelCommand
from .sigproc import SigprocCommand

COMMANDS = {
    cls.name: cls
    for cls in (CalibrateCommand, EvalCommand, TrainCommand, SweepCommand, HwModelCommand, SigprocCommand)
}

__all__ = [
    'Command', 'CalibrateCommand', 'EvalCommand', 'TrainCommand', 'SweepCommand',
    'HwModelCommand', 'SigprocCommand', 'COMMANDS',
]
