# utils/__init__.py
from .errors import EoAttnError, UserError, NumericalError, ConfigError
from .exporter import write_text, write_bytes, write_dataframe, dataframe_to_csv

__all__ = [
    'EoAttnError', 'UserError', 'NumericalError', 'ConfigError',
    'write_text', 'write_bytes', 'write_dataframe', 'dataframe_to_csv',
]
