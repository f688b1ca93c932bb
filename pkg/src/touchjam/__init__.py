"""Mixture-density recurrent network for musical touchscreen gestures."""

from .data import Performance, TouchEvent
from .model import Model, ModelConfig, load_checkpoint, save_checkpoint
from .responder import GeneratedPerformance, condition, generate, respond
from .trainer import LossLog, TrainingHyper, evaluate, train

__all__ = [
    "Performance",
    "TouchEvent",
    "Model",
    "ModelConfig",
    "load_checkpoint",
    "save_checkpoint",
    "GeneratedPerformance",
    "condition",
    "generate",
    "respond",
    "LossLog",
    "TrainingHyper",
    "evaluate",
    "train",
]
