import pytest
import torch

from sketch2photo.content.adain import adain
from sketch2photo.content.networks import (ContentDecoder, ContentEncoder,
                                           PlainResidualBlock, enrich)


def tiny_encoder() -> ContentEncoder:
    torch.manual_seed(0)
    return ContentEncoder(base_width=4)


def tiny_decoder() -> ContentDecoder:
    torch.manual_seed(0)
    return ContentDecoder(base_width=4, n_residual_blocks=2)


class TestEncoder:
    def test_output_is_quarter_resolution_with_8x_channels(self):
        enc = tiny_encoder()
        out = enc(torch.rand(1, 3, 64, 64))
        assert out.shape == (1, 32, 16, 16)
        assert enc.out_channels == 32

    def test_grayscale_input_replicated_to_rgb(self):
        enc = tiny_encoder().eval()
        gray = torch.rand(1, 1, 32, 32)
        with torch.no_grad():
            from_gray = enc(gray)
            from_rgb = enc(gray.repeat(1, 3, 1, 1))
        assert torch.equal(from_gray, from_rgb)

    def test_rejects_odd_channel_counts(self):
        with pytest.raises(ValueError, match="channels"):
            tiny_encoder()(torch.rand(1, 2, 32, 32))

    def test_rejects_indivisible_spatial_size(self):
        with pytest.raises(ValueError, match="divisible"):
            tiny_encoder()(torch.rand(1, 3, 30, 30))

    def test_rejects_unbatched_input(self):
        with pytest.raises(ValueError, match="N×C×H×W"):
            tiny_encoder()(torch.rand(3, 32, 32))

    def test_nine_convolutions_two_pools(self):
        convs = [m for m in tiny_encoder().features
                 if isinstance(m, torch.nn.Conv2d)]
        pools = [m for m in tiny_encoder().features
                 if isinstance(m, torch.nn.MaxPool2d)]
        assert len(convs) == 9
        assert len(pools) == 2
        assert [c.out_channels for c in convs] == [4, 4, 8, 8, 16, 16, 16, 16, 32]


class TestDecoder:
    def test_output_shape_and_range(self):
        dec = tiny_decoder()
        out = dec(torch.randn(1, 32, 8, 8))
        assert out.shape == (1, 3, 32, 32)
        assert out.min() >= 0.0 and out.max() <= 1.0

    def test_rejects_wrong_feature_width(self):
        with pytest.raises(ValueError, match="features"):
            tiny_decoder()(torch.randn(1, 16, 8, 8))

    def test_residual_trunk_has_no_normalization(self):
        """Normalization in the trunk would erase the statistics that the
        AdaIN step injected, so the blocks must stay norm-free."""
        dec = tiny_decoder()
        norm_types = (torch.nn.InstanceNorm2d, torch.nn.BatchNorm2d,
                      torch.nn.GroupNorm, torch.nn.LayerNorm)
        for module in dec.blocks.modules():
            assert not isinstance(module, norm_types)

    def test_plain_block_is_residual(self):
        torch.manual_seed(0)
        block = PlainResidualBlock(4)
        for p in block.parameters():
            torch.nn.init.zeros_(p)
        x = torch.randn(1, 4, 6, 6)
        assert torch.equal(block(x), x)


class TestEnrich:
    def test_matches_manual_composition(self):
        enc, dec = tiny_encoder().eval(), tiny_decoder().eval()
        gray = torch.rand(1, 1, 32, 32)
        ref = torch.rand(1, 3, 32, 32)
        with torch.no_grad():
            combined = enrich(enc, dec, gray, ref)
            manual = dec(adain(enc(gray), enc(ref)))
        assert torch.equal(combined, manual)

    def test_no_reference_uses_sentinel(self):
        enc, dec = tiny_encoder().eval(), tiny_decoder().eval()
        gray = torch.rand(1, 1, 32, 32)
        with torch.no_grad():
            out = enrich(enc, dec, gray)
            manual = dec(adain(enc(gray)))
        assert torch.equal(out, manual)
        assert out.shape == (1, 3, 32, 32)
