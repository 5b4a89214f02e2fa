"""
Parameter document
INI-style text holding calibrated Optmax/Optmoid records; floats are written
at 17 significant digits so load(save(p)) reproduces p exactly.
"""

import configparser
import io
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Union

from activations.components import NormModel, SlopeFunction
from activations.noise import NoiseSpec
from activations.optmax import OptmaxParams
from activations.optmoid import OptmoidParams
from activations.quantization import QuantSpec, bits_label, parse_bits
from mzm.transfer import SineTransferModel, SlopeSegment, VoltageWindow
from utils.errors import ConfigError
from utils.exporter import write_text

logger = logging.getLogger(__name__)


def _f(value: float) -> str:
    return format(float(value), '.17g')


@dataclass(frozen=True)
class ParamsDocument:
    """Calibrated records plus the fit report they came from"""

    optmax: Optional[OptmaxParams] = None
    optmoid: Optional[OptmoidParams] = None
    report: Dict[str, float] = field(default_factory=dict)


def _put_model(cp: configparser.ConfigParser, section: str, model: SineTransferModel) -> None:
    cp[section] = {
        'a': _f(model.a), 'b': _f(model.b), 'c': _f(model.c),
        'v_min': _f(model.window.v_min), 'v_max': _f(model.window.v_max),
    }


def _put_quant(cp: configparser.ConfigParser, section: str, spec: QuantSpec) -> None:
    cp[section] = {
        'bits': bits_label(spec.bits), 'lo': _f(spec.lo), 'hi': _f(spec.hi),
        'rounding': spec.rounding.value,
    }


def _put_noise(cp: configparser.ConfigParser, section: str, spec: NoiseSpec) -> None:
    cp[section] = {'mode': spec.mode.value, 'sigma': _f(spec.sigma), 'reference': spec.reference.value}


def dumps_params(doc: ParamsDocument) -> str:
    """Serialize a parameter document to text"""
    cp = configparser.ConfigParser(interpolation=None)
    if doc.report:
        cp['report'] = {key: _f(value) for key, value in sorted(doc.report.items())}

    if doc.optmax is not None:
        p = doc.optmax
        if not isinstance(p.f_exp, SlopeFunction) or not isinstance(p.norm, NormModel):
            raise ValueError("Only calibrated Optmax records (slope components) can be serialized")
        cp['optmax'] = {
            'x_min': _f(p.x_min), 'x_max': _f(p.x_max), 'z_min': _f(p.z_min), 'z_max': _f(p.z_max),
            'alpha': _f(p.norm.alpha), 'beta': _f(p.norm.beta), 'sse': _f(p.norm.sse),
        }
        _put_model(cp, 'optmax.exp_model', p.f_exp.model)
        _put_model(cp, 'optmax.rec_model', p.norm.f_rec.model)
        _put_quant(cp, 'optmax.q_in', p.q_in)
        _put_quant(cp, 'optmax.q_out', p.q_out)
        _put_noise(cp, 'optmax.noise', p.noise)

    if doc.optmoid is not None:
        p = doc.optmoid
        cp['optmoid'] = {
            'bias': _f(p.bias), 'x_min': _f(p.x_min), 'x_max': _f(p.x_max),
            'residual': _f(p.residual), 'fit_lo': _f(p.fit_range[0]), 'fit_hi': _f(p.fit_range[1]),
            'grid_points': str(p.grid_points),
        }
        _put_model(cp, 'optmoid.model', p.f_sig.model)
        _put_quant(cp, 'optmoid.q_in', p.q_in)
        _put_quant(cp, 'optmoid.q_out', p.q_out)
        _put_noise(cp, 'optmoid.noise', p.noise)

    buffer = io.StringIO()
    cp.write(buffer)
    return buffer.getvalue()


def _section(cp: configparser.ConfigParser, name: str) -> configparser.SectionProxy:
    if not cp.has_section(name):
        raise ConfigError(f"Parameter document is missing section [{name}]")
    return cp[name]


def _get_float(section: configparser.SectionProxy, key: str) -> float:
    try:
        return float(section[key])
    except KeyError:
        raise ConfigError(f"[{section.name}] is missing '{key}'")
    except ValueError:
        raise ConfigError(f"[{section.name}] {key} = {section[key]!r} is not a number")


def _get_model(cp: configparser.ConfigParser, name: str) -> SineTransferModel:
    s = _section(cp, name)
    return SineTransferModel(
        _get_float(s, 'a'), _get_float(s, 'b'), _get_float(s, 'c'),
        VoltageWindow(_get_float(s, 'v_min'), _get_float(s, 'v_max')),
    )


def _get_quant(cp: configparser.ConfigParser, name: str) -> QuantSpec:
    s = _section(cp, name)
    try:
        return QuantSpec(parse_bits(s.get('bits', 'inf')), _get_float(s, 'lo'), _get_float(s, 'hi'),
                         s.get('rounding', 'floor'))
    except ValueError as e:
        raise ConfigError(f"[{name}] {e}")


def _get_noise(cp: configparser.ConfigParser, name: str) -> NoiseSpec:
    s = _section(cp, name)
    try:
        return NoiseSpec(s.get('mode', 'none'), float(s.get('sigma', '0')), s.get('reference', 'absolute'))
    except ValueError as e:
        raise ConfigError(f"[{name}] {e}")


def loads_params(text: str) -> ParamsDocument:
    """Parse a parameter document; components are rebuilt without refitting"""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"Malformed parameter document: {e}")

    optmax = optmoid = None
    if cp.has_section('optmax'):
        s = cp['optmax']
        x_min, x_max = _get_float(s, 'x_min'), _get_float(s, 'x_max')
        z_min, z_max = _get_float(s, 'z_min'), _get_float(s, 'z_max')
        f_rec = SlopeFunction(_get_model(cp, 'optmax.rec_model'), SlopeSegment.FALLING, z_min, z_max)
        norm = NormModel(alpha=_get_float(s, 'alpha'), beta=_get_float(s, 'beta'), f_rec=f_rec,
                         z_min=z_min, z_max=z_max, sse=_get_float(s, 'sse'))
        optmax = OptmaxParams(
            x_min=x_min, x_max=x_max,
            f_exp=SlopeFunction(_get_model(cp, 'optmax.exp_model'), SlopeSegment.RISING, x_min, x_max),
            norm=norm, q_in=_get_quant(cp, 'optmax.q_in'), q_out=_get_quant(cp, 'optmax.q_out'),
            noise=_get_noise(cp, 'optmax.noise'),
        )

    if cp.has_section('optmoid'):
        s = cp['optmoid']
        x_min, x_max = _get_float(s, 'x_min'), _get_float(s, 'x_max')
        optmoid = OptmoidParams(
            bias=_get_float(s, 'bias'), x_min=x_min, x_max=x_max,
            f_sig=SlopeFunction(_get_model(cp, 'optmoid.model'), SlopeSegment.FULL_SWING, x_min, x_max),
            q_in=_get_quant(cp, 'optmoid.q_in'), q_out=_get_quant(cp, 'optmoid.q_out'),
            noise=_get_noise(cp, 'optmoid.noise'), residual=_get_float(s, 'residual'),
            fit_range=(_get_float(s, 'fit_lo'), _get_float(s, 'fit_hi')),
            grid_points=int(s.get('grid_points', '256')),
        )

    if optmax is None and optmoid is None:
        raise ConfigError("Parameter document holds neither an [optmax] nor an [optmoid] record")
    report = {key: float(value) for key, value in cp['report'].items()} if cp.has_section('report') else {}
    return ParamsDocument(optmax=optmax, optmoid=optmoid, report=report)


def save_params(doc: ParamsDocument, path: Union[str, Path]) -> dict:
    return write_text(dumps_params(doc), path)


def load_params(path: Union[str, Path]) -> ParamsDocument:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Parameter file not found: {path}")
    logger.info(f"Loading activation parameters from {path}")
    return loads_params(path.read_text(encoding='utf-8'))
