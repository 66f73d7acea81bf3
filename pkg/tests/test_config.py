"""
Tests for job configuration documents.
"""
import json

import pytest

from hilbert_mvf.config import JobConfig, load_config
from hilbert_mvf.errors import ConfigError


class TestJobConfig:
    def test_defaults(self):
        config = load_config(None)
        assert config.field.spec == "Q"
        assert config.rep.spec == "trivial:1"
        assert config.poincare.lambdas == (2.0, 4.0, 8.0)
        assert config.extraction.grid == 64

    def test_from_dict_normalizes_values(self):
        config = JobConfig.from_dict(
            {"field": {"spec": "Q(sqrt:5)"}, "poincare": {"nu": [1, 0], "bounds": [5, 10], "tau": [0, 1.5, 0, 1.3]}}
        )
        assert config.poincare.nu == ((1, 0),)
        assert config.poincare.bounds == (5.0, 10.0)
        assert config.poincare.tau == (0.0, 1.5, 0.0, 1.3)

    @pytest.mark.parametrize(
        "document",
        [
            {"mystery": {}},
            {"field": {"name": "Q"}},
            {"field": "Q"},
            {"extraction": {"grid": 48}},
            {"extraction": {"tol_periodic": 2.0}},
            {"poincare": {"bound": 0}},
            {"poincare": {"tau": [0, 1, 0]}},
            {"poincare": {"lambdas": [0.5]}},
            {"lattice": {"scale": [0, 0]}},
            [],
        ],
    )
    def test_rejects_invalid_documents(self, document):
        with pytest.raises(ConfigError):
            JobConfig.from_dict(document)

    def test_override_ignores_none(self):
        config = JobConfig()
        assert config.override("field", spec=None) is config
        changed = config.override("poincare", bound=20.0, eisenstein=True)
        assert changed.poincare.bound == 20.0 and changed.poincare.eisenstein
        with pytest.raises(ConfigError):
            config.override("nowhere", x=1)
        with pytest.raises(ConfigError):
            config.override("extraction", grid=10)

    def test_digest_tracks_content(self):
        a = JobConfig.from_dict({"rep": {"spec": "permmod:2"}})
        b = JobConfig.from_dict({"rep": {"spec": "permmod:2"}})
        assert a.digest() == b.digest()
        assert a.digest() != JobConfig().digest()
        assert len(a.digest()) == 64

    def test_extraction_section_builds_quadrature(self):
        section = JobConfig.from_dict({"extraction": {"grid": 32, "y0": [1, 2]}}).extraction
        quadrature = section.to_extraction_config(seed=7, workers=2)
        assert (quadrature.grid, quadrature.seed, quadrature.workers) == (32, 7, 2)
        assert quadrature.y0 == (1.0, 2.0)


class TestLoadConfig:
    def test_reads_file(self, tmp_path):
        path = tmp_path / "job.json"
        path.write_text(json.dumps({"weight": {"rows": "3,3"}}), encoding="utf-8")
        assert load_config(path).weight.rows == "3,3"

    def test_bad_files(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("not json", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(bad)
