"""Multi-scale patch discriminators for the normal and stress branches."""

import torch
import torch.nn as nn
import torch.nn.functional as F

from .generator import xavier_init


class PatchDiscriminator(nn.Module):
    """PatchGAN that strides down until the feature map is >= min_feat."""

    def __init__(self, in_channels: int, input_size: int, base_channels: int = 64, min_feat: int = 4):
        super().__init__()
        layers: list[nn.Module] = []
        cin, cout = in_channels, base_channels
        size = input_size
        first = True
        while size // 2 >= min_feat:
            layers.append(nn.Conv2d(cin, cout, 4, stride=2, padding=1))
            if not first:
                layers.append(nn.InstanceNorm2d(cout))
            layers.append(nn.LeakyReLU(0.2, inplace=True))
            cin, cout = cout, min(cout * 2, base_channels * 8)
            size //= 2
            first = False
        layers.append(nn.Conv2d(cin, 1, 4, stride=1, padding=1))
        self.net = nn.Sequential(*layers)
        self.apply(xavier_init)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.net(x)


class MultiScaleDiscriminator(nn.Module):
    """Three patch discriminators at full, half, and quarter resolution."""

    def __init__(self, in_channels: int, input_size: int, base_channels: int = 64):
        super().__init__()
        self.scales = nn.ModuleList(
            [
                PatchDiscriminator(in_channels, input_size, base_channels),
                PatchDiscriminator(in_channels, input_size // 2, base_channels),
                PatchDiscriminator(in_channels, input_size // 4, base_channels),
            ]
        )

    def forward(self, x: torch.Tensor) -> list[torch.Tensor]:
        outs = [self.scales[0](x)]
        half = F.avg_pool2d(x, 2)
        outs.append(self.scales[1](half))
        outs.append(self.scales[2](F.avg_pool2d(half, 2)))
        return outs


class DiscriminatorBank(nn.Module):
    """The pair (D_n, D_y); optionally conditioned on (sketch, point map)."""

    def __init__(
        self,
        input_size: int,
        base_channels: int = 64,
        conditional: bool = False,
        use_normal: bool = True,
    ):
        super().__init__()
        self.conditional = conditional
        self.use_normal = use_normal
        cond = 2 if conditional else 0
        if use_normal:
            self.d_normal = MultiScaleDiscriminator(3 + cond, input_size, base_channels)
        self.d_stress = MultiScaleDiscriminator(1 + cond, input_size, base_channels)

    def _with_condition(self, img: torch.Tensor, condition: torch.Tensor | None) -> torch.Tensor:
        if not self.conditional:
            return img
        if condition is None:
            raise ValueError("conditional discriminator requires the (sketch, point) condition")
        return torch.cat([img, condition], dim=1)

    def normal_scores(self, n: torch.Tensor, condition: torch.Tensor | None = None):
        return self.d_normal(self._with_condition(n, condition))

    def stress_scores(self, y: torch.Tensor, condition: torch.Tensor | None = None):
        return self.d_stress(self._with_condition(y, condition))
