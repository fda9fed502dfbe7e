from .generator import GeneratorConfig, GeneratorOutput, TwoBranchGenerator
from .discriminator import DiscriminatorBank, MultiScaleDiscriminator
from .losses import adversarial_losses, point_loss, shape_loss, total_loss
from .train import TrainConfig, load_checkpoint, save_checkpoint, train
from .infer import InferenceResult, infer

__all__ = [
    "GeneratorConfig",
    "GeneratorOutput",
    "TwoBranchGenerator",
    "DiscriminatorBank",
    "MultiScaleDiscriminator",
    "adversarial_losses",
    "point_loss",
    "shape_loss",
    "total_loss",
    "TrainConfig",
    "train",
    "save_checkpoint",
    "load_checkpoint",
    "InferenceResult",
    "infer",
]
