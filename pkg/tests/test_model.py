import numpy as np
import pytest
import torch

from stresspix.model import (
    DiscriminatorBank,
    GeneratorConfig,
    TwoBranchGenerator,
    adversarial_losses,
    load_checkpoint,
    point_loss,
    shape_loss,
    total_loss,
)
from stresspix.model.losses import lsgan_discriminator_term, lsgan_generator_term


class _ConstBank:
    """Stub bank returning a fixed score per input tensor, keyed by storage
    pointer so detached views resolve to the same score."""

    use_normal = True

    def __init__(self, value_map):
        self.value_map = {t.data_ptr(): v for t, v in value_map.items()}

    def _score(self, img):
        return [torch.full((1, 1, 2, 2), self.value_map[img.data_ptr()])]

    def normal_scores(self, n, condition=None):
        return self._score(n)

    def stress_scores(self, y, condition=None):
        return self._score(y)


class TestAdversarialLosses:
    def test_perfect_discriminator_zero_d_term(self):
        real = torch.rand(1, 1, 4, 4)
        fake = torch.rand(1, 1, 4, 4)
        real_n = torch.rand(1, 3, 4, 4)
        fake_n = torch.rand(1, 3, 4, 4)
        bank = _ConstBank({real: 1.0, fake: 0.0, real_n: 1.0, fake_n: 0.0})
        _, d_term = adversarial_losses(bank, (real_n, real), (fake_n, fake))
        assert d_term.item() == pytest.approx(0.0, abs=1e-12)

    def test_equilibrium_when_indistinguishable(self):
        """D stuck at the LSGAN equilibrium output 0.5 -> both terms 0.25/scale,
        summed over the two discriminators."""
        t = torch.rand(1, 1, 4, 4)
        n = torch.rand(1, 3, 4, 4)
        bank = _ConstBank({t: 0.5, n: 0.5})
        g_term, d_term = adversarial_losses(bank, (n, t), (n, t))
        assert g_term.item() == pytest.approx(2 * 0.25)
        assert d_term.item() == pytest.approx(2 * 0.25)

    def test_hand_computed_fixed_outputs(self):
        """D(real)=0.3, D(fake)=0.7 single scale:
        d = 0.5*((0.3-1)^2 + 0.7^2) = 0.49 per discriminator -> 0.98 total;
        g = (0.7-1)^2 = 0.09 per discriminator -> 0.18 total."""
        real_y = torch.rand(1, 1, 2, 2)
        fake_y = torch.rand(1, 1, 2, 2)
        real_n = torch.rand(1, 3, 2, 2)
        fake_n = torch.rand(1, 3, 2, 2)
        bank = _ConstBank(
            {real_y: 0.3, fake_y: 0.7, real_n: 0.3, fake_n: 0.7}
        )
        g_term, d_term = adversarial_losses(bank, (real_n, real_y), (fake_n, fake_y))
        assert d_term.item() == pytest.approx(0.98)
        assert g_term.item() == pytest.approx(0.18)

    def test_scale_averaging(self):
        scores_a = [torch.full((1, 1, 2, 2), 0.0), torch.full((1, 1, 2, 2), 1.0)]
        assert lsgan_generator_term(scores_a).item() == pytest.approx((1.0 + 0.0) / 2)
        d = lsgan_discriminator_term(
            [torch.full((1, 1, 2, 2), 1.0)], [torch.full((1, 1, 2, 2), 1.0)]
        )
        assert d.item() == pytest.approx(0.5)


class TestShapeLoss:
    def test_identical_zero(self):
        m = torch.rand(2, 1, 8, 8)
        assert shape_loss(m, m).item() == 0.0

    def test_ones_vs_zeros(self):
        assert shape_loss(torch.ones(1, 1, 4, 4), torch.zeros(1, 1, 4, 4)).item() == 1.0

    def test_2x2_hand_case(self):
        pred = torch.tensor([[[[1.0, 0.0], [0.0, 1.0]]]])
        true = torch.tensor([[[[1.0, 1.0], [0.0, 1.0]]]])
        assert shape_loss(pred, true).item() == pytest.approx(0.25)


class TestPointLoss:
    def test_zero_attention(self):
        y = torch.rand(1, 1, 4, 4)
        n = torch.rand(1, 3, 4, 4)
        mp = torch.zeros(1, 1, 4, 4)
        assert point_loss(y, torch.rand_like(y), n, torch.rand_like(n), mp).item() == 0.0

    def test_perfect_prediction(self):
        y = torch.rand(1, 1, 4, 4)
        n = torch.rand(1, 3, 4, 4)
        mp = torch.ones(1, 1, 4, 4)
        assert point_loss(y, y, n, n, mp).item() == 0.0

    def test_2x2_hand_case(self):
        mp = torch.ones(1, 1, 2, 2)
        y = torch.zeros(1, 1, 2, 2)
        y_hat = torch.full((1, 1, 2, 2), 0.1)
        n = torch.zeros(1, 3, 2, 2)
        n_hat = torch.full((1, 3, 2, 2), 0.2)
        assert point_loss(y_hat, y, n_hat, n, mp).item() == pytest.approx(0.3)

    def test_without_normal_branch(self):
        mp = torch.ones(1, 1, 2, 2)
        y = torch.zeros(1, 1, 2, 2)
        y_hat = torch.full((1, 1, 2, 2), 0.1)
        assert point_loss(y_hat, y, None, None, mp).item() == pytest.approx(0.1)


class TestTotalLoss:
    def test_defaults_are_paper_weights(self):
        from stresspix.model.losses import LAMBDA_POINT, LAMBDA_SHAPE

        assert LAMBDA_SHAPE == 500.0
        assert LAMBDA_POINT == 100.0

    def test_zero_parts(self):
        g = torch.tensor(1.23)
        assert total_loss(g, torch.tensor(0.0), torch.tensor(0.0)).item() == pytest.approx(1.23)

    def test_hand_case(self):
        val = total_loss(torch.tensor(1.0), torch.tensor(0.01), torch.tensor(0.02))
        assert val.item() == pytest.approx(1.0 + 5.0 + 2.0)

    def test_linear_in_lambdas(self):
        g = torch.tensor(0.5)
        s = torch.tensor(0.3)
        p = torch.tensor(0.7)
        for lam1, lam2 in ((0.0, 0.0), (250.0, 50.0), (500.0, 100.0)):
            expected = 0.5 + lam1 * 0.3 + lam2 * 0.7
            assert total_loss(g, s, p, lam1, lam2).item() == pytest.approx(expected)


class TestGradients:
    def test_shape_loss_matches_finite_differences(self):
        torch.manual_seed(0)
        pred = (torch.rand(1, 1, 4, 4, dtype=torch.float64) * 0.5 + 0.3).requires_grad_(True)
        true = torch.rand(1, 1, 4, 4, dtype=torch.float64) * 0.1  # keep |diff| away from 0
        loss = shape_loss(pred, true)
        loss.backward()
        analytic = pred.grad.clone()
        eps = 1e-6
        with torch.no_grad():
            fd = torch.zeros_like(pred)
            flat = pred.view(-1)
            for i in range(flat.numel()):
                orig = flat[i].item()
                flat[i] = orig + eps
                up = shape_loss(pred, true).item()
                flat[i] = orig - eps
                down = shape_loss(pred, true).item()
                flat[i] = orig
                fd.view(-1)[i] = (up - down) / (2 * eps)
        assert torch.allclose(analytic, fd, rtol=1e-4, atol=1e-10)

    def test_point_loss_matches_finite_differences(self):
        torch.manual_seed(1)
        y_hat = (torch.rand(1, 1, 4, 4, dtype=torch.float64) * 0.5 + 0.4).requires_grad_(True)
        y = torch.rand(1, 1, 4, 4, dtype=torch.float64) * 0.2
        n_hat = (torch.rand(1, 3, 4, 4, dtype=torch.float64) * 0.5 + 0.4).requires_grad_(True)
        n = torch.rand(1, 3, 4, 4, dtype=torch.float64) * 0.2
        mp = torch.rand(1, 1, 4, 4, dtype=torch.float64) * 0.5 + 0.5
        loss = point_loss(y_hat, y, n_hat, n, mp)
        loss.backward()
        analytic = y_hat.grad.clone()
        eps = 1e-6
        with torch.no_grad():
            fd = torch.zeros_like(y_hat)
            flat = y_hat.view(-1)
            for i in range(flat.numel()):
                orig = flat[i].item()
                flat[i] = orig + eps
                up = point_loss(y_hat, y, n_hat, n, mp).item()
                flat[i] = orig - eps
                down = point_loss(y_hat, y, n_hat, n, mp).item()
                flat[i] = orig
                fd.view(-1)[i] = (up - down) / (2 * eps)
        assert torch.allclose(analytic, fd, rtol=1e-4, atol=1e-10)


class TestGeneratorForward:
    def test_shapes_and_ranges(self):
        torch.manual_seed(0)
        g = TwoBranchGenerator(GeneratorConfig(resolution=64, base_channels=16))
        x = torch.rand(4, 1, 64, 64)
        p = torch.rand(4, 1, 64, 64)
        out = g(x, p)
        assert out.normal.shape == (4, 3, 64, 64)
        assert out.stress.shape == (4, 1, 64, 64)
        assert out.mask.shape == (4, 1, 64, 64)
        for t in (out.normal, out.stress, out.mask):
            assert t.min() >= 0.0 and t.max() <= 1.0
            assert torch.isfinite(t).all()

    def test_eval_deterministic(self):
        torch.manual_seed(0)
        g = TwoBranchGenerator(GeneratorConfig(resolution=32, base_channels=8)).eval()
        x = torch.rand(1, 1, 32, 32)
        p = torch.rand(1, 1, 32, 32)
        with torch.no_grad():
            a = g(x, p)
            b = g(x, p)
        assert torch.equal(a.stress, b.stress)
        assert torch.equal(a.normal, b.normal)

    def test_mismatched_sizes_rejected(self):
        g = TwoBranchGenerator(GeneratorConfig(resolution=32, base_channels=8))
        with pytest.raises(ValueError):
            g(torch.rand(1, 1, 32, 32), torch.rand(1, 1, 16, 16))

    def test_depth_scales_with_resolution(self):
        assert GeneratorConfig(resolution=256).depth == 7
        assert GeneratorConfig(resolution=64).depth == 5
        assert GeneratorConfig(resolution=32).depth == 4

    def test_normal_skip_is_live(self):
        torch.manual_seed(0)
        g = TwoBranchGenerator(GeneratorConfig(resolution=32, base_channels=8)).eval()
        x = torch.rand(1, 1, 32, 32)
        p = torch.rand(1, 1, 32, 32)
        with torch.no_grad():
            full = g(x, p)
            ablated = g(x, p, disable_normal_skip=True)
        assert not torch.allclose(full.stress, ablated.stress)

    def test_no_normal_branch_config(self):
        torch.manual_seed(0)
        g = TwoBranchGenerator(
            GeneratorConfig(resolution=32, base_channels=8, use_normal_branch=False)
        )
        out = g(torch.rand(1, 1, 32, 32), torch.rand(1, 1, 32, 32))
        assert out.normal is None
        assert out.stress.shape == (1, 1, 32, 32)


class TestDiscriminatorBank:
    def test_three_scales(self):
        torch.manual_seed(0)
        bank = DiscriminatorBank(input_size=64, base_channels=8)
        scores = bank.stress_scores(torch.rand(2, 1, 64, 64))
        assert len(scores) == 3
        for s in scores:
            assert s.shape[0] == 2 and s.shape[1] == 1
        # the three heads are distinct networks with their own depths
        depths = [len(d.net) for d in bank.d_stress.scales]
        assert depths[0] > depths[1] > depths[2]

    def test_conditional_requires_condition(self):
        bank = DiscriminatorBank(input_size=32, base_channels=8, conditional=True)
        with pytest.raises(ValueError):
            bank.stress_scores(torch.rand(1, 1, 32, 32))
        cond = torch.rand(1, 2, 32, 32)
        scores = bank.stress_scores(torch.rand(1, 1, 32, 32), cond)
        assert len(scores) == 3


class TestCheckpoint:
    def test_roundtrip_identical_outputs(self, tiny_checkpoint):
        bundle = load_checkpoint(tiny_checkpoint)
        g = bundle["generator"]
        torch.manual_seed(3)
        x = torch.rand(1, 1, 32, 32)
        p = torch.rand(1, 1, 32, 32)
        with torch.no_grad():
            a = g(x, p)
        bundle2 = load_checkpoint(tiny_checkpoint)
        with torch.no_grad():
            b = bundle2["generator"](x, p)
        assert torch.equal(a.stress, b.stress)
        assert bundle["generator_config"].resolution == 32
