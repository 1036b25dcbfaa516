import json
import struct

import numpy as np
import pytest

from mtdespeckle.errors import (
    BadMagicError,
    DimensionOverflowError,
    DuplicateDateError,
    ManifestError,
    MissingFileError,
    TruncatedError,
    UnsupportedVersionError,
)
from mtdespeckle.io import (
    StackManifest,
    export_preview,
    load_manifest,
    load_stack,
    read_pgm,
    read_raster,
    save_stack,
    write_manifest,
    write_raster,
)
from mtdespeckle.stack import ChangeEvent, simulate_stack


class TestRaster:
    def test_small_round_trip(self, tmp_path):
        im = np.arange(6, dtype=np.float32).reshape(2, 3)
        write_raster(tmp_path / "a.rdim", im)
        back = read_raster(tmp_path / "a.rdim")
        assert back.shape == (2, 3) and back.dtype == np.float32
        np.testing.assert_array_equal(back, im)

    def test_layout(self, tmp_path):
        write_raster(tmp_path / "a.rdim", np.array([[1.5, 2.0, 0.0]], dtype=np.float32))
        raw = (tmp_path / "a.rdim").read_bytes()
        assert struct.unpack_from("<4sIIII", raw) == (b"RDIM", 1, 3, 1, 1)
        assert raw[20:] == struct.pack("<3f", 1.5, 2.0, 0.0)

    def test_bit_exact_both_ways(self, tmp_path):
        rng = np.random.default_rng(0)
        im = rng.exponential(1.0, (17, 23)).astype(np.float32)
        im[0, 0] = np.float32(np.finfo(np.float32).tiny)
        write_raster(tmp_path / "a.rdim", im)
        raw = (tmp_path / "a.rdim").read_bytes()
        assert read_raster(tmp_path / "a.rdim").tobytes() == im.tobytes()
        write_raster(tmp_path / "b.rdim", read_raster(tmp_path / "a.rdim"))
        assert (tmp_path / "b.rdim").read_bytes() == raw

    def test_bad_magic(self, tmp_path):
        (tmp_path / "x.rdim").write_bytes(b"XXXX" + struct.pack("<4I", 1, 1, 1, 1) + bytes(4))
        with pytest.raises(BadMagicError):
            read_raster(tmp_path / "x.rdim")

    def test_truncated(self, tmp_path):
        write_raster(tmp_path / "a.rdim", np.ones((4, 4), np.float32))
        raw = (tmp_path / "a.rdim").read_bytes()
        (tmp_path / "a.rdim").write_bytes(raw[:-1])
        with pytest.raises(TruncatedError):
            read_raster(tmp_path / "a.rdim")
        (tmp_path / "a.rdim").write_bytes(raw[:10])
        with pytest.raises(TruncatedError):
            read_raster(tmp_path / "a.rdim")

    def test_overflow(self, tmp_path):
        (tmp_path / "a.rdim").write_bytes(struct.pack("<4s4I", b"RDIM", 1, 65536, 65536, 1))
        with pytest.raises(DimensionOverflowError):
            read_raster(tmp_path / "a.rdim")

    def test_unknown_version(self, tmp_path):
        (tmp_path / "a.rdim").write_bytes(struct.pack("<4s4I", b"RDIM", 9, 1, 1, 1) + bytes(4))
        with pytest.raises(UnsupportedVersionError):
            read_raster(tmp_path / "a.rdim")


class TestManifest:
    def test_stack_round_trip(self, tmp_path):
        stack = simulate_stack(np.ones((8, 8)), 3, 2.0,
                               [ChangeEvent((0, 0, 2, 2), (1,), 3.0)], seed=1)
        path = save_stack(tmp_path / "st", stack, "demo", (0, 0, 4, 4))
        m = load_manifest(path)
        assert m.stack_id == "demo" and m.looks == 2.0
        assert m.homogeneous_region == (0, 0, 4, 4)
        back = load_stack(m)
        assert back.images.tobytes() == stack.images.tobytes()
        assert back.dates == stack.dates
        assert back.changes == stack.changes
        write_manifest(tmp_path / "st" / "copy.json", m)
        assert (tmp_path / "st" / "copy.json").read_bytes() == path.read_bytes()

    def _write(self, tmp_path, entries):
        for _, p in entries:
            write_raster(tmp_path / p, np.ones((2, 2), np.float32)) if p != "gone.rdim" else None
        m = StackManifest("s", 1.0, entries)
        write_manifest(tmp_path / "m.json", m)
        return tmp_path / "m.json"

    def test_duplicate_dates(self, tmp_path):
        path = self._write(tmp_path, [("d1", "a.rdim"), ("d1", "b.rdim")])
        with pytest.raises(DuplicateDateError):
            load_manifest(path)

    def test_missing_file(self, tmp_path):
        path = self._write(tmp_path, [("d1", "a.rdim"), ("d2", "gone.rdim")])
        with pytest.raises(MissingFileError):
            load_manifest(path)

    def test_too_few_entries(self, tmp_path):
        path = self._write(tmp_path, [("d1", "a.rdim")])
        with pytest.raises(ManifestError):
            load_manifest(path)

    def test_malformed(self, tmp_path):
        (tmp_path / "m.json").write_text(json.dumps({"entries": [{"date": "x"}]}))
        with pytest.raises(ManifestError) as info:
            load_manifest(tmp_path / "m.json")
        assert not isinstance(info.value, (DuplicateDateError, MissingFileError))


class TestPreview:
    def test_constant(self, tmp_path):
        export_preview(np.full((5, 6), 3.0), tmp_path / "p.pgm")
        px = read_pgm(tmp_path / "p.pgm")
        assert px.shape == (5, 6) and np.ptp(px) == 0

    def test_two_values(self, tmp_path):
        im = np.ones((10, 10))
        im[:, 5:] = 100.0
        export_preview(im, tmp_path / "p.pgm", gamma_stretch=0.7)
        px = read_pgm(tmp_path / "p.pgm")
        assert len(np.unique(px)) == 2
        assert px[0, 9] > px[0, 0]

    def test_header(self, tmp_path):
        export_preview(np.random.default_rng(0).exponential(size=(7, 9)), tmp_path / "p.pgm")
        assert (tmp_path / "p.pgm").read_bytes().startswith(b"P5\n9 7\n255\n")
