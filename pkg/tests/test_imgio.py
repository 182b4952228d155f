"""PGM parsing and writing, index mapping, enlargement, ground truth."""

import numpy as np
import pytest

from fcmseg import (
    DimensionMismatchError,
    GrayImage,
    LabelMap,
    MalformedHeaderError,
    MissingClassError,
    PgmValueError,
    TruncatedRasterError,
    UnsupportedMagicError,
    enlarge_dataset,
    flatten_index,
    label_intensity,
    membership_index,
    read_ground_truth,
    read_pgm,
    write_pgm,
)
from fcmseg.imgio import parse_pgm


class TestReadPgm:
    def test_ascii_p2(self, tmp_path):
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P2\n2 2\n255\n0 10 20 30\n")
        img = read_pgm(path)
        assert (img.width, img.height) == (2, 2)
        assert img.pixels.tolist() == [0.0, 10.0, 20.0, 30.0]

    def test_binary_p5_equivalent(self, tmp_path):
        path = tmp_path / "b.pgm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 10, 20, 30]))
        img = read_pgm(path)
        assert img.pixels.tolist() == [0.0, 10.0, 20.0, 30.0]

    def test_comments_are_skipped(self, tmp_path):
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P2\n# made by hand\n2 1 # inline\n# another\n255\n5 6\n")
        img = read_pgm(path)
        assert img.pixels.tolist() == [5.0, 6.0]

    def test_sixteen_bit_binary_is_big_endian(self, tmp_path):
        path = tmp_path / "d.pgm"
        path.write_bytes(b"P5\n2 1\n65535\n" + bytes([0x01, 0x02, 0xFF, 0xFE]))
        img = read_pgm(path)
        assert img.pixels.tolist() == [258.0, 65534.0]

    def test_unsupported_magic(self):
        with pytest.raises(UnsupportedMagicError):
            parse_pgm(b"P6\n1 1\n255\n\x00\x00\x00")

    def test_malformed_header(self):
        with pytest.raises(MalformedHeaderError):
            parse_pgm(b"P2\nnot a number\n")
        with pytest.raises(MalformedHeaderError):
            parse_pgm(b"P2\n2 2\n70000\n0 0 0 0\n")
        with pytest.raises(MalformedHeaderError):
            parse_pgm(b"garbage")

    def test_truncated_raster(self):
        with pytest.raises(TruncatedRasterError):
            parse_pgm(b"P5\n2 2\n255\n\x00\x01")
        with pytest.raises(TruncatedRasterError):
            parse_pgm(b"P2\n2 2\n255\n0 1 2\n")

    def test_sample_above_maxval(self):
        with pytest.raises(PgmValueError):
            parse_pgm(b"P2\n2 1\n10\n5 11\n")

    def test_error_types_are_distinct(self):
        kinds = {UnsupportedMagicError, MalformedHeaderError, TruncatedRasterError}
        assert len(kinds) == 3


class TestWritePgm:
    def test_round_trip_gray(self, tmp_path):
        img = GrayImage(3, 2, [0, 255, 17, 4, 99, 200])
        path = tmp_path / "rt.pgm"
        write_pgm(img, path)
        back = read_pgm(path)
        assert back.pixels.tolist() == img.pixels.tolist()
        assert (back.width, back.height) == (3, 2)

    def test_round_trip_sixteen_bit(self, tmp_path):
        img = GrayImage(2, 1, [256.0, 65535.0])
        path = tmp_path / "wide.pgm"
        write_pgm(img, path)
        assert read_pgm(path).pixels.tolist() == [256.0, 65535.0]

    def test_random_round_trips(self, tmp_path):
        rng = np.random.default_rng(12)
        for trial in range(30):
            w = int(rng.integers(1, 9))
            h = int(rng.integers(1, 9))
            maxval = 255 if trial % 2 == 0 else 65535
            values = rng.integers(0, maxval + 1, size=w * h).astype(np.float64)
            img = GrayImage(w, h, values)
            path = tmp_path / f"r{trial}.pgm"
            write_pgm(img, path)
            back = read_pgm(path)
            assert back.pixels.tolist() == values.tolist()

    def test_two_cluster_label_levels(self, tmp_path):
        labels = LabelMap(2, 1, [0, 1], 2)
        path = tmp_path / "two.pgm"
        write_pgm(labels, path)
        assert read_pgm(path).pixels.tolist() == [0.0, 255.0]

    def test_four_cluster_label_levels(self, tmp_path):
        labels = LabelMap(4, 1, [0, 1, 2, 3], 4)
        path = tmp_path / "four.pgm"
        write_pgm(labels, path)
        assert read_pgm(path).pixels.tolist() == [0.0, 85.0, 170.0, 255.0]
        assert [label_intensity(j, 4) for j in range(4)] == [0, 85, 170, 255]

    def test_rejects_fractional_intensities(self, tmp_path):
        img = GrayImage(1, 1, [0.5])
        with pytest.raises(ValueError):
            write_pgm(img, tmp_path / "frac.pgm")


class TestFlattenIndex:
    def test_example(self):
        assert flatten_index(2, 3, 10) == 23

    def test_origin(self):
        assert flatten_index(0, 0, 10) == 0

    def test_bijective_over_domain(self):
        width, height = 7, 5
        seen = {flatten_index(r, c, width, height) for r in range(height) for c in range(width)}
        assert seen == set(range(width * height))

    def test_out_of_bounds(self):
        with pytest.raises(IndexError):
            flatten_index(0, 10, 10)
        with pytest.raises(IndexError):
            flatten_index(5, 0, 10, height=5)
        with pytest.raises(IndexError):
            flatten_index(-1, 0, 10)

    def test_membership_index(self):
        assert membership_index(3, 1, 4) == 13
        with pytest.raises(IndexError):
            membership_index(0, 4, 4)


class TestEnlargeDataset:
    def test_quadruple_makes_two_by_two_grid(self):
        img = GrayImage.from_array(np.arange(10000, dtype=np.float64).reshape(100, 100) % 256)
        big = enlarge_dataset(img, 40000)
        assert (big.width, big.height) == (200, 200)
        quad = big.to_array()
        assert np.array_equal(quad[:100, :100], img.to_array())
        assert np.array_equal(quad[100:, 100:], img.to_array())

    def test_same_size_is_identity(self):
        img = GrayImage(4, 4, np.arange(16, dtype=np.float64))
        assert enlarge_dataset(img, 16) is img

    def test_histogram_scales_by_tile_count(self):
        rng = np.random.default_rng(13)
        img = GrayImage(8, 8, rng.integers(0, 40, size=64).astype(np.float64))
        big = enlarge_dataset(img, 64 * 6)  # 6 tiles round up to a 3x2 grid
        tiles = big.pixel_count // img.pixel_count
        base_vals, base_counts = np.unique(img.pixels, return_counts=True)
        big_vals, big_counts = np.unique(big.pixels, return_counts=True)
        assert np.array_equal(base_vals, big_vals)
        assert np.array_equal(base_counts * tiles, big_counts)

    def test_width_is_multiple_of_original(self):
        img = GrayImage(10, 6, np.zeros(60))
        for target in (60, 100, 500, 1234):
            big = enlarge_dataset(img, target)
            assert big.width % 10 == 0
            assert big.height % 6 == 0
            assert big.pixel_count >= target

    def test_rejects_shrinking(self):
        img = GrayImage(4, 4, np.zeros(16))
        with pytest.raises(ValueError):
            enlarge_dataset(img, 8)


def write_mask(path, bits2d, maxval=255):
    arr = np.where(np.asarray(bits2d, dtype=bool), maxval, 0).astype(np.float64)
    write_pgm(GrayImage(arr.shape[1], arr.shape[0], arr.reshape(-1)), path)


class TestReadGroundTruth:
    def make_truth(self, directory, size=4):
        grid = np.zeros((size, size), dtype=bool)
        quarters = {
            "wm": (slice(0, size // 2), slice(0, size // 2)),
            "gm": (slice(0, size // 2), slice(size // 2, size)),
            "csf": (slice(size // 2, size), slice(0, size // 2)),
            "background": (slice(size // 2, size), slice(size // 2, size)),
        }
        for name, region in quarters.items():
            bits = grid.copy()
            bits[region] = True
            write_mask(directory / f"{name}.pgm", bits)

    def test_reads_all_classes(self, tmp_path):
        self.make_truth(tmp_path)
        masks = read_ground_truth(tmp_path)
        assert set(masks) == {"wm", "gm", "csf", "background"}
        assert sum(mask.count for mask in masks.values()) == 16

    def test_threshold_rule(self, tmp_path):
        self.make_truth(tmp_path)
        masks = read_ground_truth(tmp_path)
        wm = masks["wm"]
        assert wm.bits.reshape(4, 4)[0, 0]
        assert not wm.bits.reshape(4, 4)[3, 3]

    def test_missing_class(self, tmp_path):
        self.make_truth(tmp_path)
        (tmp_path / "csf.pgm").unlink()
        with pytest.raises(MissingClassError):
            read_ground_truth(tmp_path)

    def test_dimension_mismatch(self, tmp_path):
        self.make_truth(tmp_path)
        write_mask(tmp_path / "wm.pgm", np.ones((2, 2), dtype=bool))
        with pytest.raises(DimensionMismatchError):
            read_ground_truth(tmp_path)

    def test_overlap_warns(self, tmp_path):
        self.make_truth(tmp_path)
        bits = np.zeros((4, 4), dtype=bool)
        bits[:2, :] = True  # spills into gm territory
        write_mask(tmp_path / "wm.pgm", bits)
        with pytest.warns(UserWarning, match="overlap"):
            read_ground_truth(tmp_path)
