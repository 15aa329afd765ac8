import subprocess
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest
import torch

from convexport import ExportError, ExportSpec, export_weights, load_checkpoint

import filtspec

EXPORT_CLI = [sys.executable, "-m", "convexport"]
FILTSPEC_CLI = [sys.executable, "-m", "filtspec"]


def eegnet_checkpoint(tmp_path, name="eegnet.npz"):
    """8 filters x 50 taps behind singleton spatial axes, as EEGNet lays it out."""
    rng = np.random.default_rng(1)
    tensor = rng.normal(size=(8, 1, 1, 50)).astype(np.float32)
    path = tmp_path / name
    np.savez(path, **{"conv1.weight": tensor})
    return path, tensor


def msacnn_checkpoint(tmp_path, name="msacnn.npz"):
    rng = np.random.default_rng(2)
    tensors = {
        f"msm1.scale{i + 1}.conv.weight": rng.normal(size=(8, 1, 15)).astype(np.float32)
        for i in range(4)
    }
    path = tmp_path / name
    np.savez(path, **tensors)
    return path, tensors


def spec_for(path, kind, **kwargs):
    return ExportSpec(
        checkpoint_path=path, model_kind=kind, sampling_rate_hz=100.0, **kwargs
    )


class TestEegnetExport:
    def test_shapes_and_bit_exact_values(self, tmp_path):
        ckpt, tensor = eegnet_checkpoint(tmp_path)
        out = export_weights(spec_for(ckpt, "eegnet"), tmp_path / "eegnet.weights.json")
        bank = filtspec.load_weights(out)
        assert len(bank.scales) == 1
        assert bank.scales[0].downsample_factor == 1
        assert bank.weights[0].shape == (8, 50)
        assert np.array_equal(
            bank.weights[0], tensor.squeeze().astype(np.float64)
        )

    def test_label_defaults_to_checkpoint_stem(self, tmp_path):
        ckpt, _ = eegnet_checkpoint(tmp_path)
        out = export_weights(spec_for(ckpt, "eegnet"), tmp_path / "w.weights.json")
        assert filtspec.load_weights(out).model_label == "eegnet"

    def test_checkpoint_is_not_modified(self, tmp_path):
        ckpt, _ = eegnet_checkpoint(tmp_path)
        before = ckpt.read_bytes()
        export_weights(spec_for(ckpt, "eegnet"), tmp_path / "w.weights.json")
        assert ckpt.read_bytes() == before


class TestMsacnnExport:
    def test_four_scales(self, tmp_path):
        ckpt, tensors = msacnn_checkpoint(tmp_path)
        out = export_weights(spec_for(ckpt, "msa-cnn"), tmp_path / "m.weights.json")
        bank = filtspec.load_weights(out)
        assert [s.downsample_factor for s in bank.scales] == [1, 2, 4, 8]
        assert all(w.shape == (8, 15) for w in bank.weights)
        for i, scale_weights in enumerate(bank.weights):
            original = tensors[f"msm1.scale{i + 1}.conv.weight"].squeeze()
            assert np.array_equal(scale_weights, original.astype(np.float64))

    def test_custom_downsample_factors(self, tmp_path):
        ckpt, _ = msacnn_checkpoint(tmp_path)
        out = export_weights(
            spec_for(ckpt, "msa-cnn", downsample_factors=(1, 3, 5, 7)),
            tmp_path / "m.weights.json",
        )
        bank = filtspec.load_weights(out)
        assert [s.downsample_factor for s in bank.scales] == [1, 3, 5, 7]

    def test_resaving_through_primary_is_byte_identical(self, tmp_path):
        ckpt, _ = msacnn_checkpoint(tmp_path)
        out = export_weights(spec_for(ckpt, "msa-cnn"), tmp_path / "m.weights.json")
        resaved = filtspec.save_weights(
            filtspec.load_weights(out), tmp_path / "resaved.weights.json"
        )
        assert resaved.read_bytes() == out.read_bytes()


class TestTorchCheckpoints:
    def test_state_dict_file(self, tmp_path):
        tensor = torch.randn(8, 1, 1, 50)
        path = tmp_path / "model.pt"
        torch.save({"conv1.weight": tensor}, path)
        out = export_weights(spec_for(path, "eegnet"), tmp_path / "t.weights.json")
        bank = filtspec.load_weights(out)
        expected = tensor.numpy().squeeze().astype(np.float32)
        assert np.array_equal(bank.weights[0], expected.astype(np.float64))

    def test_wrapped_state_dict(self, tmp_path):
        path = tmp_path / "wrapped.pt"
        torch.save({"state_dict": {"firstconv.weight": torch.randn(4, 1, 20)}}, path)
        out = export_weights(spec_for(path, "eegnet"), tmp_path / "t.weights.json")
        bank = filtspec.load_weights(out)
        assert bank.weights[0].shape == (4, 20)


class TestGenericMode:
    def test_time_axis_zero_transposes(self, tmp_path):
        tensor = np.random.default_rng(3).normal(size=(30, 6)).astype(np.float32)
        path = tmp_path / "generic.npz"
        np.savez(path, **{"encoder.proj.weight": tensor})
        out = export_weights(
            spec_for(
                path,
                "generic",
                layer_patterns=("encoder.proj.weight",),
                downsample_factors=(1,),
                time_axis=0,
            ),
            tmp_path / "g.weights.json",
        )
        bank = filtspec.load_weights(out)
        assert bank.weights[0].shape == (6, 30)
        assert np.array_equal(bank.weights[0], tensor.T.astype(np.float64))

    def test_requires_time_axis(self, tmp_path):
        path = tmp_path / "g.npz"
        np.savez(path, w=np.ones((4, 8), dtype=np.float32))
        with pytest.raises(ExportError, match="time-axis"):
            spec_for(path, "generic", layer_patterns=("w",), downsample_factors=(1,))

    def test_pattern_factor_count_mismatch(self, tmp_path):
        path = tmp_path / "g.npz"
        np.savez(path, a=np.ones((4, 8), dtype=np.float32), b=np.ones((4, 8), dtype=np.float32))
        spec = spec_for(
            path, "generic", layer_patterns=("a", "b"), downsample_factors=(1,), time_axis=1
        )
        with pytest.raises(ExportError, match="patterns for"):
            export_weights(spec, tmp_path / "g.weights.json")


class TestFailureModes:
    def test_missing_layer_reports_patterns_and_names(self, tmp_path):
        path = tmp_path / "c.npz"
        np.savez(path, **{"classifier.weight": np.ones((4, 8), dtype=np.float32)})
        with pytest.raises(ExportError, match="no tensor matches"):
            export_weights(spec_for(path, "eegnet"), tmp_path / "w.weights.json")

    def test_ambiguous_match_reports_candidates(self, tmp_path):
        path = tmp_path / "c.npz"
        np.savez(
            path,
            **{
                "a.conv1.weight": np.ones((4, 8), dtype=np.float32),
                "b.conv1.weight": np.ones((4, 8), dtype=np.float32),
            },
        )
        with pytest.raises(ExportError, match="conv1.weight"):
            export_weights(spec_for(path, "eegnet"), tmp_path / "w.weights.json")

    def test_non_conforming_shape_names_tensor(self, tmp_path):
        path = tmp_path / "c.npz"
        np.savez(path, **{"conv1.weight": np.ones((4, 3, 8), dtype=np.float32)})
        with pytest.raises(ExportError, match="conv1.weight"):
            export_weights(spec_for(path, "eegnet"), tmp_path / "w.weights.json")

    def test_inconsistent_taps_across_scales(self, tmp_path):
        path = tmp_path / "c.npz"
        np.savez(
            path,
            **{
                "msm1.scale1.weight": np.ones((4, 15), dtype=np.float32),
                "msm1.scale2.weight": np.ones((4, 12), dtype=np.float32),
            },
        )
        spec = spec_for(path, "msa-cnn", downsample_factors=(1, 2))
        with pytest.raises(ExportError, match="taps"):
            export_weights(spec, tmp_path / "w.weights.json")

    def test_missing_checkpoint(self, tmp_path):
        with pytest.raises(ExportError, match="not found"):
            load_checkpoint(tmp_path / "absent.npz")


class TestCli:
    def run(self, *args):
        return subprocess.run(
            EXPORT_CLI + list(args), capture_output=True, text=True, timeout=60
        )

    def test_export_then_primary_pipeline(self, tmp_path):
        ckpt, _ = msacnn_checkpoint(tmp_path)
        out_file = tmp_path / "m.weights.json"
        result = self.run(
            "--checkpoint", str(ckpt), "--model", "msa-cnn",
            "--rate", "100", "--out", str(out_file),
        )
        assert result.returncode == 0, result.stderr
        spectrum = subprocess.run(
            FILTSPEC_CLI + ["filter-spectrum", str(out_file), "--out", str(tmp_path / "out")],
            capture_output=True, text=True, timeout=60,
        )
        assert spectrum.returncode == 0, spectrum.stderr
        lines = (tmp_path / "out" / "spectrum.csv").read_text().splitlines()
        assert len(lines) == 21  # header + 20 unified bins

    def test_unknown_model_is_usage_error(self, tmp_path):
        result = self.run(
            "--checkpoint", "x.npz", "--model", "vgg", "--rate", "100", "--out", "w.json"
        )
        assert result.returncode == 1

    def test_missing_checkpoint_is_input_error(self, tmp_path):
        result = self.run(
            "--checkpoint", str(tmp_path / "absent.npz"), "--model", "eegnet",
            "--rate", "100", "--out", str(tmp_path / "w.weights.json"),
        )
        assert result.returncode == 2
        assert "error" in result.stderr


@contextmanager
def criterion(name):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name}")
        raise
    print(f"[PASS] {name} ({time.perf_counter() - start:.2f}s)")


def test_acceptance_exporter_contract(tmp_path):
    with criterion(
        "exporter contract: fixture checkpoints export to valid weights files, bit-exact"
    ):
        eegnet_path, eegnet_tensor = eegnet_checkpoint(tmp_path)
        out = export_weights(
            spec_for(eegnet_path, "eegnet"), tmp_path / "eegnet.weights.json"
        )
        bank = filtspec.load_weights(out)
        assert len(bank.scales) == 1
        assert bank.weights[0].shape == (8, 50)
        assert np.array_equal(bank.weights[0], eegnet_tensor.squeeze().astype(np.float64))

        msacnn_path, msacnn_tensors = msacnn_checkpoint(tmp_path)
        out = export_weights(
            spec_for(msacnn_path, "msa-cnn"), tmp_path / "msacnn.weights.json"
        )
        bank = filtspec.load_weights(out)
        assert len(bank.scales) == 4
        assert all(w.shape == (8, 15) for w in bank.weights)
        for i, weights in enumerate(bank.weights):
            original = msacnn_tensors[f"msm1.scale{i + 1}.conv.weight"].squeeze()
            assert np.array_equal(weights, original.astype(np.float64))
