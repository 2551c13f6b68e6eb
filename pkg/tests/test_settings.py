import pytest
from django.core.exceptions import ImproperlyConfigured
from django.test.utils import override_settings

from curve_surfacing.hypothesis import DrawingPairSource
from curve_surfacing.loft import LoftParams
from curve_surfacing.occlusion import OcclusionParams
from curve_surfacing.settings import surfacing_settings


def test_defaults():
    assert surfacing_settings.TAU_E == pytest.approx(3.0)
    assert surfacing_settings.PAIR_SOURCE_CLASS is DrawingPairSource


def test_unknown_setting():
    with pytest.raises(AttributeError):
        surfacing_settings.NOT_A_SETTING


@override_settings(CURVE_SURFACING={"TAU_E": 5.0, "SUBDIV_LEVELS": 1})
def test_user_settings_override_defaults():
    assert surfacing_settings.TAU_E == pytest.approx(5.0)
    assert OcclusionParams.from_settings().tau_E == pytest.approx(5.0)
    assert LoftParams.from_settings().subdiv_levels == 1


@override_settings(CURVE_SURFACING={"TOPOLOGY_MODE": "sometimes"})
def test_bad_topology_mode():
    with pytest.raises(ImproperlyConfigured):
        surfacing_settings.TOPOLOGY_MODE


@override_settings(CURVE_SURFACING={"RAY_TRACER_CLASS": "curve_surfacing.raytrace.Missing"})
def test_bad_import_string():
    with pytest.raises(ImportError):
        surfacing_settings.RAY_TRACER_CLASS


@override_settings(CURVE_SURFACING={"RESAMPLE_STEP": 0})
def test_mandatory_setting():
    with pytest.raises(AttributeError):
        surfacing_settings.RESAMPLE_STEP


def test_params_from_file(tmp_path):
    path = tmp_path / "p.json"
    path.write_text('{"tau_E": 2.5, "strict_all": true}')
    params = OcclusionParams.from_file(path)
    assert params.tau_E == pytest.approx(2.5)
    assert params.strict_all
    assert params.tau_loc == pytest.approx(2.0)


def test_params_validation():
    with pytest.raises(ImproperlyConfigured):
        OcclusionParams.from_dict({"tau_theta": 2.0})
