"""Training objective: least-squares adversarial surrogate plus the shape-mask
and force-point L1 constraints, combined linearly with lambda weights."""

import torch
import torch.nn.functional as F

LAMBDA_SHAPE = 500.0
LAMBDA_POINT = 100.0


def lsgan_generator_term(fake_scores: list[torch.Tensor]) -> torch.Tensor:
    """Mean over scales of (D(fake) - 1)^2: the non-saturating direction."""
    return torch.stack([((s - 1.0) ** 2).mean() for s in fake_scores]).mean()


def lsgan_discriminator_term(
    real_scores: list[torch.Tensor], fake_scores: list[torch.Tensor]
) -> torch.Tensor:
    """Mean over scales of 0.5 * [(D(real) - 1)^2 + D(fake)^2]."""
    terms = [
        0.5 * (((r - 1.0) ** 2).mean() + (f**2).mean())
        for r, f in zip(real_scores, fake_scores)
    ]
    return torch.stack(terms).mean()


def adversarial_losses(
    bank,
    real: tuple[torch.Tensor | None, torch.Tensor],
    fake: tuple[torch.Tensor | None, torch.Tensor],
    condition: torch.Tensor | None = None,
) -> tuple[torch.Tensor, torch.Tensor]:
    """Generator and discriminator adversarial terms over both discriminators.

    `real` and `fake` are (normal map, stress map); the normal entries may be
    None when the normal branch is ablated. Fake tensors are detached inside
    the discriminator term.
    """
    real_n, real_y = real
    fake_n, fake_y = fake

    g_terms = [lsgan_generator_term(bank.stress_scores(fake_y, condition))]
    d_terms = [
        lsgan_discriminator_term(
            bank.stress_scores(real_y, condition),
            bank.stress_scores(fake_y.detach(), condition),
        )
    ]
    if bank.use_normal and fake_n is not None and real_n is not None:
        g_terms.append(lsgan_generator_term(bank.normal_scores(fake_n, condition)))
        d_terms.append(
            lsgan_discriminator_term(
                bank.normal_scores(real_n, condition),
                bank.normal_scores(fake_n.detach(), condition),
            )
        )
    return sum(g_terms), sum(d_terms)


def shape_loss(mask_pred: torch.Tensor, mask_true: torch.Tensor) -> torch.Tensor:
    """L1 distance between predicted and ground-truth shape masks."""
    return F.l1_loss(mask_pred, mask_true)


def point_loss(
    stress_pred: torch.Tensor,
    stress_true: torch.Tensor,
    normal_pred: torch.Tensor | None,
    normal_true: torch.Tensor | None,
    attention: torch.Tensor,
) -> torch.Tensor:
    """Attention-weighted L1 on stress and normal maps around the force point."""
    loss = F.l1_loss(attention * stress_pred, attention * stress_true)
    if normal_pred is not None and normal_true is not None:
        loss = loss + F.l1_loss(attention * normal_pred, attention * normal_true)
    return loss


def total_loss(
    gan_term: torch.Tensor,
    shape_term: torch.Tensor,
    point_term: torch.Tensor,
    lambda_shape: float = LAMBDA_SHAPE,
    lambda_point: float = LAMBDA_POINT,
) -> torch.Tensor:
    return gan_term + lambda_shape * shape_term + lambda_point * point_term
