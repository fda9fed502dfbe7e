"""One-encoder, two-decoder generator mapping (sketch, point map) to
(normal map, stress map) plus a shape mask from the joint feature space."""

import math
from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

MAX_DEPTH = 7  # up-sampling stages at 256^2 input


@dataclass(frozen=True)
class GeneratorConfig:
    resolution: int = 256
    base_channels: int = 64
    in_channels: int = 2  # sketch + point map
    use_normal_branch: bool = True

    @property
    def depth(self) -> int:
        """Down/up stages; 7 at 256^2, reduced so the bottleneck stays >= 2^2."""
        return min(MAX_DEPTH, int(math.log2(self.resolution)) - 1)

    def encoder_channels(self) -> list[int]:
        return [min(self.base_channels * 2**i, self.base_channels * 8) for i in range(self.depth)]


@dataclass
class GeneratorOutput:
    normal: torch.Tensor | None  # (B, 3, H, W) in [0, 1]; None if branch ablated
    stress: torch.Tensor  # (B, 1, H, W) in [0, 1]
    mask: torch.Tensor  # (B, 1, H, W) in [0, 1]


def _down_block(cin: int, cout: int, normalize: bool) -> nn.Sequential:
    layers: list[nn.Module] = [nn.Conv2d(cin, cout, 4, stride=2, padding=1)]
    if normalize:
        layers.append(nn.InstanceNorm2d(cout))
    layers.append(nn.LeakyReLU(0.2, inplace=True))
    return nn.Sequential(*layers)


def _up_block(cin: int, cout: int, normalize: bool = True) -> nn.Sequential:
    layers: list[nn.Module] = [nn.ConvTranspose2d(cin, cout, 4, stride=2, padding=1)]
    if normalize:
        layers.append(nn.InstanceNorm2d(cout))
    layers.append(nn.ReLU(inplace=True))
    return nn.Sequential(*layers)


class TwoBranchGenerator(nn.Module):
    """Shared encoder; normal and stress decoders with encoder skips.

    The normal decoder's feature maps are layer-wise concatenated into the
    stress decoder at every matching resolution, enriching its structure
    perception; a mask head reads the bottleneck joint feature space.
    """

    def __init__(self, config: GeneratorConfig):
        super().__init__()
        self.config = config
        d = config.depth
        enc_ch = config.encoder_channels()

        # No normalization on the first block (raw input statistics) nor on
        # tiny maps (instance stats over <= 4^2 sites erase the signal, in
        # particular the force-point location at the bottleneck).
        self.encoder = nn.ModuleList()
        cin = config.in_channels
        for i, cout in enumerate(enc_ch):
            out_size = config.resolution // 2 ** (i + 1)
            self.encoder.append(_down_block(cin, cout, normalize=(i > 0 and out_size > 4)))
            cin = cout

        # Decoder stage j upsamples from resolution res/2^(d-j) to res/2^(d-j-1).
        dec_out = [enc_ch[d - 2 - j] if j < d - 1 else config.base_channels for j in range(d)]
        self._dec_out = dec_out

        def decoder_stack(with_normal_feats: bool) -> nn.ModuleList:
            stages = nn.ModuleList()
            for j in range(d):
                if j == 0:
                    cin_j = enc_ch[d - 1]
                else:
                    cin_j = dec_out[j - 1] + enc_ch[d - 1 - j]
                    if with_normal_feats:
                        cin_j += dec_out[j - 1]
                out_size = config.resolution // 2 ** (d - 1 - j)
                stages.append(_up_block(cin_j, dec_out[j], normalize=out_size > 4))
            return stages

        use_n = config.use_normal_branch
        if use_n:
            self.normal_decoder = decoder_stack(with_normal_feats=False)
            self.normal_head = nn.Conv2d(config.base_channels, 3, 3, padding=1)
        self.stress_decoder = decoder_stack(with_normal_feats=use_n)
        stress_head_in = config.base_channels * (2 if use_n else 1)
        self.stress_head = nn.Conv2d(stress_head_in, 1, 3, padding=1)

        # Mask head off the bottleneck joint feature space: a light learned
        # upsampling stack (bilinear from 2^2 cannot express a silhouette).
        bott = enc_ch[d - 1]
        mask_layers: list[nn.Module] = []
        cin_m = bott
        for j in range(d):
            cout_m = max(config.base_channels // 2, bott // 2 ** (j + 1))
            out_size = config.resolution // 2 ** (d - 1 - j)
            mask_layers.append(_up_block(cin_m, cout_m, normalize=out_size > 4))
            cin_m = cout_m
        mask_layers.append(nn.Conv2d(cin_m, 1, 3, padding=1))
        self.mask_head = nn.Sequential(*mask_layers)
        self.apply(xavier_init)

    def forward(
        self, sketch: torch.Tensor, point: torch.Tensor, disable_normal_skip: bool = False
    ) -> GeneratorOutput:
        if sketch.shape[-2:] != point.shape[-2:]:
            raise ValueError(
                f"sketch {tuple(sketch.shape[-2:])} and point map "
                f"{tuple(point.shape[-2:])} spatial sizes differ"
            )
        if sketch.shape[-1] != self.config.resolution:
            raise ValueError(
                f"input resolution {sketch.shape[-1]} != configured {self.config.resolution}"
            )
        x = torch.cat([sketch, point], dim=1)
        skips = []
        for enc in self.encoder:
            x = enc(x)
            skips.append(x)
        bottleneck = skips[-1]
        d = self.config.depth

        normal_feats: list[torch.Tensor] = []
        normal_out = None
        if self.config.use_normal_branch:
            h = bottleneck
            for j, stage in enumerate(self.normal_decoder):
                h = stage(h)
                normal_feats.append(h)
                if j < d - 1:
                    h = torch.cat([h, skips[d - 2 - j]], dim=1)
            normal_out = torch.sigmoid(self.normal_head(normal_feats[-1]))

        h = bottleneck
        for j, stage in enumerate(self.stress_decoder):
            h = stage(h)
            if self.config.use_normal_branch:
                nf = normal_feats[j]
                if disable_normal_skip:
                    nf = torch.zeros_like(nf)
                h = torch.cat([h, nf], dim=1)
            if j < d - 1:
                h = torch.cat([h, skips[d - 2 - j]], dim=1)
        stress_out = torch.sigmoid(self.stress_head(h))

        mask_logits = self.mask_head(bottleneck)
        if mask_logits.shape[-2:] != sketch.shape[-2:]:
            mask_logits = F.interpolate(
                mask_logits, size=sketch.shape[-2:], mode="bilinear", align_corners=False
            )
        mask = torch.sigmoid(mask_logits)
        return GeneratorOutput(normal=normal_out, stress=stress_out, mask=mask)


def xavier_init(module: nn.Module) -> None:
    if isinstance(module, (nn.Conv2d, nn.ConvTranspose2d)):
        nn.init.xavier_normal_(module.weight)
        if module.bias is not None:
            nn.init.zeros_(module.bias)
