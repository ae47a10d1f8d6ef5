import math

import numpy as np
import pytest

import freqfuse


def test_dct_matrix_is_orthonormal():
    for n in (2, 4, 8):
        t = freqfuse.dct_matrix(n)
        assert np.allclose(t @ t.T, np.eye(n), atol=1e-12)


def test_block_round_trip():
    rng = np.random.default_rng(0)
    m = rng.uniform(0, 255, size=(8, 8))
    d = freqfuse.forward_dct_block(m)
    assert d[0, 0] == pytest.approx((m - 128).sum() / 8)
    assert np.allclose(freqfuse.inverse_dct_block(d), m, atol=1e-9)


def test_zigzag_corners():
    assert freqfuse.zigzag_index(0, 0, 8) == 0
    assert freqfuse.zigzag_index(0, 1, 8) == 1
    assert freqfuse.zigzag_index(7, 7, 8) == 63


def test_pipeline_shape_and_labels():
    img = np.random.default_rng(1).integers(0, 256, size=(100, 80, 3), dtype=np.uint8)
    cube, labels = freqfuse.dct_pipeline(img, image_size=448)
    assert cube.shape == (24, 56, 56)
    assert [p for p, _, _ in labels].count("Y") == 16
    assert labels[0] == ("Y", 0, 0)


def test_pooled_features_and_fusion():
    img = np.full((64, 64, 3), 128, dtype=np.uint8)
    f = freqfuse.extract_features(img, mode="frequency", image_size=64)
    assert f.shape == (48,)
    assert np.allclose(f, 0.0)
    s = freqfuse.extract_features(img, mode="spatial", image_size=64)
    assert np.allclose(s, [128, 0] * 3)
    assert np.allclose(freqfuse.l2_normalize(np.array([3.0, 4.0])), [0.6, 0.8])
    fused = freqfuse.fuse(np.ones(6), np.full(48, 2.0))
    assert fused.shape == (54,)
    assert np.linalg.norm(fused) == pytest.approx(math.sqrt(2))


def test_dump_round_trip_and_merge(tmp_path):
    ids = [f"i{k}" for k in range(10)]
    classes = [f"c{k % 5}" for k in range(10)]
    rng = np.random.default_rng(2)
    s = freqfuse.FeatureDump("spatial", ids, classes, rng.normal(size=(10, 6)))
    f = freqfuse.FeatureDump("frequency", ids, classes, rng.normal(size=(10, 48)))
    freqfuse.write_dump(s, tmp_path / "s.fsfd")
    back = freqfuse.read_dump(tmp_path / "s.fsfd")
    assert back.item_ids == ids
    assert np.array_equal(back.values, s.values.astype(np.float32).astype(np.float64))
    merged = freqfuse.merge_dumps(back, f)
    assert merged.branch == "fused"
    assert merged.values.shape == (10, 54)


def test_errors_surface_as_freqfuse_error(tmp_path):
    (tmp_path / "bad.fsfd").write_bytes(b"NOPE")
    with pytest.raises(freqfuse.FreqfuseError, match="BadMagic"):
        freqfuse.read_dump(tmp_path / "bad.fsfd")
    with pytest.raises(freqfuse.FreqfuseError, match="TooFewEpisodes"):
        freqfuse.summarize_accuracies([0.5])


def test_confidence_interval():
    mean, hw = freqfuse.summarize_accuracies([0.6, 0.8])
    assert mean == pytest.approx(70.0)
    assert hw == pytest.approx(19.6)


def test_synthetic_episodes_are_reproducible():
    samples = freqfuse.generate_synthetic("mixed", classes=6, per_class=20, size=32, seed=3)
    assert len(samples) == 120
    ids = [s[0] for s in samples]
    classes = [s[1] for s in samples]
    values = np.stack([freqfuse.extract_features(s[2], mode="frequency", image_size=32) for s in samples])
    dump = freqfuse.FeatureDump("frequency", ids, classes, values)
    a = freqfuse.evaluate_episodes(dump, way=5, shot=1, query=5, episodes=50, seed=4)
    b = freqfuse.evaluate_episodes(dump, way=5, shot=1, query=5, episodes=50, seed=4, threads=2)
    assert a == b
    assert 0.0 <= a["mean"] <= 100.0


def test_load_image(tmp_path):
    p = tmp_path / "x.ppm"
    p.write_bytes(b"P6\n2 1\n255\n" + bytes([1, 2, 3, 4, 5, 6]))
    img = freqfuse.load_image(p)
    assert img.shape == (1, 2, 3)
    assert img[0, 1].tolist() == [4, 5, 6]
