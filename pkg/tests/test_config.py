"""Tests for configuration management."""

import tempfile
from pathlib import Path

import pytest
import yaml
from pydantic import ValidationError

from gmt_lab.config import DIMENSION_CAP_ENV, Config, PolytopeConfig


class TestConfig:
    """Test configuration loading and defaults."""

    def test_default_config(self):
        """Test default configuration values."""
        config = Config()

        assert config.fragment.default_bound == 4

        # Solver defaults
        assert config.solver.seed_limit == 8
        assert config.solver.det_limit is None
        assert config.solver.poss_limit == 64

        # Structure defaults
        assert config.structure.weak_arity == 3
        assert config.structure.product_search_bound == 9
        assert config.structure.max_enumeration == 5000

        assert config.polytope.dimension_cap == 24
        assert config.report.max_witness_items == 20

    def test_load_from_file(self):
        """Test loading configuration from YAML file."""
        config_data = {
            "gmt_lab": {
                "solver": {"seed_limit": 2},
                "structure": {"weak_arity": 2, "max_enumeration": 100},
            }
        }

        with tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False) as f:
            yaml.dump(config_data, f)
            temp_path = Path(f.name)

        try:
            config = Config.load_from_file(temp_path)
            assert config.solver.seed_limit == 2
            assert config.structure.weak_arity == 2
            assert config.structure.max_enumeration == 100
            # Check that other defaults are preserved
            assert config.structure.product_search_bound == 9
            assert config.solver.poss_limit == 64
        finally:
            temp_path.unlink()

    def test_missing_file_gives_defaults(self, tmp_path):
        config = Config.load_from_file(tmp_path / "absent.yaml")
        assert config == Config()

    def test_file_without_section(self, tmp_path):
        path = tmp_path / "config.yaml"
        path.write_text("other_tool:\n  key: 1\n")
        assert Config.load_from_file(path) == Config()

    def test_rejects_invalid_values(self):
        with pytest.raises(ValidationError):
            Config(structure={"weak_arity": 0})
        with pytest.raises(ValidationError):
            Config(fragment={"default_bound": 0})


class TestDimensionCap:
    """Test the polytope dimension cap and its environment override."""

    def test_file_value_without_env(self, monkeypatch):
        monkeypatch.delenv(DIMENSION_CAP_ENV, raising=False)
        assert PolytopeConfig(dimension_cap=7).resolved_dimension_cap() == 7

    def test_env_takes_precedence(self, monkeypatch):
        monkeypatch.setenv(DIMENSION_CAP_ENV, "3")
        assert PolytopeConfig(dimension_cap=7).resolved_dimension_cap() == 3

    @pytest.mark.parametrize("raw", ["", "  ", "many"])
    def test_unusable_env_is_ignored(self, monkeypatch, raw):
        monkeypatch.setenv(DIMENSION_CAP_ENV, raw)
        assert PolytopeConfig(dimension_cap=7).resolved_dimension_cap() == 7
