"""Training loop: alternating discriminator/generator updates, CSV loss log,
per-epoch checkpoints with configs and category statistics."""

import csv
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch

from .. import dataset
from .discriminator import DiscriminatorBank
from .generator import GeneratorConfig, TwoBranchGenerator
from .losses import LAMBDA_POINT, LAMBDA_SHAPE, adversarial_losses, point_loss, shape_loss, total_loss

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 2e-4
    beta1: float = 0.9
    beta2: float = 0.999
    batch_size: int = 16
    lambda_shape: float = LAMBDA_SHAPE
    lambda_point: float = LAMBDA_POINT
    epochs: int = 100
    seed: int = 0
    resolution: int = 64
    augment: bool = True
    conditional_discriminator: bool = False
    disc_base_channels: int = 32
    max_steps: int | None = None  # cap for short comparison runs
    split: str = "train"  # "all" lets the toy preset memorize every sample
    lr_decay_start: float = 0.5  # fraction of the run after which lr decays linearly to 0
    device: str = "cpu"

    def __post_init__(self):
        if self.lambda_shape < 0 or self.lambda_point < 0:
            raise ValueError("lambda weights must be nonnegative")


def save_checkpoint(
    path,
    generator: TwoBranchGenerator,
    bank: DiscriminatorBank,
    gen_config: GeneratorConfig,
    train_config: TrainConfig,
    category_stats: dict,
    epoch: int,
) -> None:
    torch.save(
        {
            "format_version": CHECKPOINT_VERSION,
            "generator_config": asdict(gen_config),
            "train_config": asdict(train_config),
            "category_stats": category_stats,
            "generator": generator.state_dict(),
            "discriminators": bank.state_dict(),
            "epoch": epoch,
        },
        path,
    )


def load_checkpoint(path, device: str = "cpu") -> dict:
    """Load a checkpoint archive; returns the bundle with a ready generator."""
    blob = torch.load(path, map_location=device, weights_only=False)
    if blob.get("format_version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint format {blob.get('format_version')}")
    gen_config = GeneratorConfig(**blob["generator_config"])
    generator = TwoBranchGenerator(gen_config)
    generator.load_state_dict(blob["generator"])
    generator.eval()
    return {
        "generator": generator,
        "generator_config": gen_config,
        "train_config": blob["train_config"],
        "category_stats": blob["category_stats"],
        "epoch": blob["epoch"],
    }


def _to_tensors(batch: dict[str, np.ndarray], device: str) -> dict[str, torch.Tensor]:
    return {k: torch.from_numpy(v).to(device) for k, v in batch.items()}


def train(
    manifest: dataset.Manifest,
    gen_config: GeneratorConfig,
    config: TrainConfig,
    out_dir,
) -> Path:
    """Train on the manifest's train split; returns the checkpoint path.

    Checkpoints are written each epoch; on a NaN loss the run aborts with the
    last good checkpoint left in place.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if not manifest.records_for_split(config.split):
        raise ValueError(f"split {config.split!r} is empty")
    if gen_config.resolution != config.resolution:
        raise ValueError("generator and training resolutions must match")

    torch.manual_seed(config.seed)
    device = config.device
    generator = TwoBranchGenerator(gen_config).to(device)
    bank = DiscriminatorBank(
        input_size=config.resolution,
        base_channels=config.disc_base_channels,
        conditional=config.conditional_discriminator,
        use_normal=gen_config.use_normal_branch,
    ).to(device)

    opt_g = torch.optim.Adam(
        generator.parameters(), lr=config.learning_rate, betas=(config.beta1, config.beta2)
    )
    opt_d = torch.optim.Adam(
        bank.parameters(), lr=config.learning_rate, betas=(config.beta1, config.beta2)
    )

    ckpt_path = out_dir / "checkpoint.pt"
    log_path = out_dir / "train_log.csv"
    step = 0
    wrote_checkpoint = False
    steps_per_epoch = -(-len(manifest.records_for_split(config.split)) // config.batch_size)
    total_steps = config.epochs * steps_per_epoch
    if config.max_steps is not None:
        total_steps = min(total_steps, config.max_steps)

    def lr_at(s: int) -> float:
        start = config.lr_decay_start * total_steps
        if s <= start or total_steps <= start:
            return config.learning_rate
        frac = (s - start) / (total_steps - start)
        return config.learning_rate * max(0.0, 1.0 - frac)
    with open(log_path, "w", newline="") as log_file:
        writer = csv.writer(log_file)
        writer.writerow(["step", "L_GAN_G", "L_GAN_D", "L_shape", "L_point", "L_total"])
        for epoch in range(config.epochs):
            for batch_np in dataset.batch_iter(
                manifest,
                config.split,
                config.batch_size,
                config.resolution,
                augment=config.augment,
                seed=config.seed + epoch,
            ):
                lr = lr_at(step)
                for opt in (opt_g, opt_d):
                    for group in opt.param_groups:
                        group["lr"] = lr
                batch = _to_tensors(batch_np, device)
                condition = torch.cat([batch["x"], batch["p"]], dim=1)
                real_n = batch["n"] if gen_config.use_normal_branch else None

                # Discriminator update
                with torch.no_grad():
                    fake = generator(batch["x"], batch["p"])
                _, d_term = adversarial_losses(
                    bank,
                    (real_n, batch["y"]),
                    (fake.normal, fake.stress),
                    condition if config.conditional_discriminator else None,
                )
                opt_d.zero_grad(set_to_none=True)
                d_term.backward()
                opt_d.step()

                # Generator update
                fake = generator(batch["x"], batch["p"])
                g_adv, _ = adversarial_losses(
                    bank,
                    (real_n, batch["y"]),
                    (fake.normal, fake.stress),
                    condition if config.conditional_discriminator else None,
                )
                l_shape = shape_loss(fake.mask, batch["ms"])
                l_point = point_loss(fake.stress, batch["y"], fake.normal, real_n, batch["mp"])
                loss = total_loss(g_adv, l_shape, l_point, config.lambda_shape, config.lambda_point)
                opt_g.zero_grad(set_to_none=True)
                loss.backward()
                opt_g.step()

                values = [g_adv.item(), d_term.item(), l_shape.item(), l_point.item(), loss.item()]
                if not all(math.isfinite(v) for v in values):
                    raise RuntimeError(
                        f"non-finite loss at step {step}; "
                        + (
                            f"last good checkpoint kept at {ckpt_path}"
                            if wrote_checkpoint
                            else "no checkpoint written yet"
                        )
                    )
                writer.writerow([step] + [f"{v:.6f}" for v in values])
                step += 1
                if config.max_steps is not None and step >= config.max_steps:
                    break
            save_checkpoint(
                ckpt_path, generator, bank, gen_config, config, manifest.category_stats, epoch
            )
            wrote_checkpoint = True
            if config.max_steps is not None and step >= config.max_steps:
                break
    if not wrote_checkpoint:
        save_checkpoint(ckpt_path, generator, bank, gen_config, config, manifest.category_stats, 0)
    return ckpt_path
