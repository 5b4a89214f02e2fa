# kernel/__init__.py
from .attention import AttentionConfig, MultiHeadAttention, TransformerBlock, attention_forward, causal_keep_mask
from .gradcheck import grad_check
from .losses import nll_loss, accuracy
from .vit import VitConfig, VisionTransformer, VIT_PRESETS, build_vit, get_vit_preset, patchify, vit_forward
from .charlm import CharLmConfig, CharTransformer, CHARLM_PRESETS, build_charlm, get_charlm_preset
from .tasks import TaskKind, TaskSpec, TaskData, generate_task
from .training import TrainConfig, TrainResult, MetricRecord, build_model, evaluate, set_determinism, train
from .sweep import SweepAxis, SweepVariant, point_activation, sweep

__all__ = [
    'AttentionConfig', 'MultiHeadAttention', 'TransformerBlock', 'attention_forward', 'causal_keep_mask',
    'grad_check', 'nll_loss', 'accuracy',
    'VitConfig', 'VisionTransformer', 'VIT_PRESETS', 'build_vit', 'get_vit_preset', 'patchify', 'vit_forward',
    'CharLmConfig', 'CharTransformer', 'CHARLM_PRESETS', 'build_charlm', 'get_charlm_preset',
    'TaskKind', 'TaskSpec', 'TaskData', 'generate_task',
    'TrainConfig', 'TrainResult', 'MetricRecord', 'build_model', 'evaluate', 'set_determinism', 'train',
    'SweepAxis', 'SweepVariant', 'point_activation', 'sweep',
]
