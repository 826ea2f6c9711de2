import math

import numpy as np
import pytest

import neglectnet as nn


SMALL = dict(depth=3, base_width=4, image_size=16)


def test_synth_is_deterministic_and_composited():
    a = nn.synth(6, seed=3)
    b = nn.synth(6, seed=3)
    assert a["x"].shape == (6, 3, 32, 32)
    assert a["z"].shape == (6, 1, 32, 32)
    for key in "xyz":
        assert np.array_equal(a[key], b[key])
    assert not np.array_equal(a["x"], nn.synth(6, seed=4)["x"])
    background = np.broadcast_to(a["z"] == 0, a["x"].shape)
    assert np.array_equal(a["x"][background], a["y"][background])
    assert a["z"].min() >= 0 and a["z"].max() <= 1


def test_dataset_round_trip(tmp_path):
    nn.make_dataset(str(tmp_path), "train", 3, seed=2)
    loaded = nn.load_dataset(str(tmp_path), "train")
    fresh = nn.synth(3, seed=2)
    assert np.abs(loaded["y"] - fresh["y"]).max() <= 1 / 127.5 + 1e-6
    with pytest.raises(OSError):
        nn.load_dataset(str(tmp_path), "missing")


def test_generator_shapes_and_ranges():
    x = nn.synth(2, seed=1, image_size=16)["x"]
    out = nn.generator_forward(x, **SMALL)
    assert out["y_p"].shape == (2, 3, 16, 16)
    assert out["z_p"].shape == (2, 1, 16, 16)
    assert [m.shape for m in out["neglect_masks"]] == [(2, 1, 8, 8), (2, 1, 4, 4), (2, 1, 2, 2)]
    assert np.all(np.abs(out["y_p"]) <= 1)
    assert all(np.all((m > 0) & (m < 1)) for m in out["neglect_masks"])
    base = nn.generator_forward(x, mode="baseline", **SMALL)
    assert base["z_p"] is None and base["neglect_masks"] == []
    with pytest.raises(ValueError):
        nn.generator_forward(x, depth=3, base_width=4, image_size=32)


def test_discriminator_patch_grid():
    s = nn.synth(2, seed=1, image_size=16)
    patches, score = nn.discriminator_forward(s["x"], s["y"], **SMALL)
    assert patches.shape == (2, 1, 2, 2)
    assert np.allclose(score, patches.reshape(2, -1).mean(axis=1), atol=1e-6)


def test_loss_identities():
    half = np.full(4, 0.5)
    assert nn.discriminator_loss(half, half) == pytest.approx(2 * math.log(2), abs=1e-6)
    assert nn.adversarial_loss(half) == pytest.approx(math.log(2), abs=1e-6)


def test_metrics_identity_and_skimage_ssim():
    rng = np.random.default_rng(0)
    a = rng.uniform(0, 1, (3, 24, 24))
    b = np.clip(a + rng.normal(0, 0.1, a.shape), 0, 1)
    assert nn.l1_pct(a, a) == 0
    assert nn.psnr(a, a) == 99
    assert nn.ssim(a, a) == pytest.approx(1)
    assert nn.l1_pct(a, b) == pytest.approx(np.abs(a - b).mean() * 100, rel=1e-5)
    mse = ((a - b) ** 2).mean()
    assert nn.psnr(a, b) == pytest.approx(10 * math.log10(1 / mse), rel=1e-5)

    metrics = pytest.importorskip("skimage.metrics")
    expected = metrics.structural_similarity(
        a, b, channel_axis=0, data_range=1.0, gaussian_weights=True, sigma=1.5, use_sample_covariance=False
    )
    assert nn.ssim(a, b) == pytest.approx(expected, abs=1e-4)


def test_mask_iou():
    p = np.zeros((1, 1, 4, 4))
    t = np.zeros((1, 1, 4, 4))
    p[..., :2, :] = 1
    t[..., 1:3, :] = 1
    assert nn.mask_iou(p, t) == pytest.approx(1 / 3)


def test_trainer_is_deterministic_and_persists(tmp_path):
    s = nn.synth(4, seed=5, image_size=16)
    runs = []
    for _ in range(2):
        t = nn.Trainer(batch_size=2, seed=9, **SMALL)
        records = t.train(s["x"], s["y"], s["z"], steps=3)
        runs.append((records, t.forward(s["x"])["y_p"]))
    assert [r["step"] for r in runs[0][0]] == [1, 2, 3]
    assert runs[0][0] == runs[1][0]
    assert np.array_equal(runs[0][1], runs[1][1])
    assert all(math.isfinite(r["l_g"]) and math.isfinite(r["l_d"]) for r in runs[0][0])

    path = str(tmp_path / "ckpt.bin")
    t.save(path)
    other = nn.Trainer(batch_size=2, seed=1, **SMALL)
    other.load(path)
    assert other.step == 3
    assert np.array_equal(other.forward(s["x"])["y_p"], runs[1][1])
    assert any(name.startswith("neglect.") for name in t.parameter_names)

    scores = other.evaluate(s["x"], s["y"], s["z"])
    assert scores["n"] == 4 and scores["mask_iou"] is not None
    with pytest.raises(OSError):
        other.load(str(tmp_path / "absent.bin"))
