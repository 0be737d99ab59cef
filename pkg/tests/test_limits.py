"""Capacity caps and the TREEPACK_CAPACITY override."""

import pytest

from treepack import CapacityError, brute_force_pack
from treepack import limits
from conftest import doubled_triangle, graph_from_pairs


class TestEffectiveCaps:
    def test_defaults_apply_without_env(self, monkeypatch):
        monkeypatch.delenv("TREEPACK_CAPACITY", raising=False)
        assert limits.effective(limits.BRUTE_EDGES) == 16
        assert limits.effective(limits.SUBSET_ELEMENTS) == 18

    def test_env_lowers_cap(self, monkeypatch):
        monkeypatch.setenv("TREEPACK_CAPACITY", "4")
        assert limits.effective(limits.BRUTE_EDGES) == 4
        assert limits.effective(limits.PARTITION_VERTICES) == 4

    def test_env_never_raises_cap(self, monkeypatch):
        monkeypatch.setenv("TREEPACK_CAPACITY", "999")
        assert limits.effective(limits.BRUTE_EDGES) == 16

    def test_garbage_env_ignored(self, monkeypatch):
        monkeypatch.setenv("TREEPACK_CAPACITY", "lots")
        assert limits.effective(limits.BRUTE_EDGES) == 16

    def test_lowered_cap_rejects_brute_force(self, monkeypatch):
        monkeypatch.setenv("TREEPACK_CAPACITY", "4")
        g = doubled_triangle()  # six edges
        with pytest.raises(CapacityError) as err:
            brute_force_pack(g, None, 2, "spanning")
        assert err.value.bound == 4 and err.value.requested == 6

    def test_capacity_error_names_bound(self):
        g = graph_from_pairs(2, [(0, 1)] * 17)
        with pytest.raises(CapacityError) as err:
            brute_force_pack(g, None, 1, "spanning")
        assert err.value.bound_name == "brute-edges"


class TestCliCapacityExit:
    def test_pack_exits_3_when_cap_blocks_certificate(self, monkeypatch, tmp_path,
                                                      capsys):
        # C5 has no two disjoint spanning trees; with every cap forced to 3
        # the certificate extraction cannot run, which must surface as a
        # capacity refusal, never as a silent verdict.
        from treepack import serialize_instance
        from treepack.cli import main
        monkeypatch.setenv("TREEPACK_CAPACITY", "3")
        g = graph_from_pairs(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
        path = tmp_path / "c5.txt"
        path.write_text(serialize_instance(g, {0, 1, 2, 3, 4}), encoding="utf-8")
        code = main(["pack", str(path), "--mode", "spanning", "--k", "2"])
        capsys.readouterr()
        assert code == 3
