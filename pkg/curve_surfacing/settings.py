"""
Pipeline settings, read the way django-rest-framework reads its own.

Settings for the surfacing pipeline are all namespaced in the CURVE_SURFACING setting.
For example your project's `settings.py` file might look like this:

CURVE_SURFACING = {
    "TAU_ALPHA": 0.2,
    "RAY_TRACER_CLASS": "curve_surfacing.raytrace.LinearScanTracer",
}

This module provides the `surfacing_settings` object, that is used to access
pipeline settings, checking for user settings first, then falling
back to the defaults.

Lengths are in meters, curvatures in 1/m, pixel quantities in pixels.
"""
import importlib

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured
from django.core.signals import setting_changed


DEFAULTS = {
    # Curve graph reorganization
    "TAU_LENGTH": 0.03,
    "SMOOTH_LAMBDA": 5.0,
    "KAPPA_BREAK": 100.0,
    "TAU_DIST": 0.02,
    "TAU_COCIRC": 0.35,
    "OVERLAP_EPS": 0.005,
    "RESAMPLE_STEP": 0.01,
    "REORG_ROUNDS": 3,
    "NODE_MERGE_TOLERANCE": 1e-6,

    # Hypothesis formation
    "TAU_ALPHA": 0.18,
    "TAU_G": 1.0,
    "USE_VIEW_TOPOLOGY": True,
    "TOPOLOGY_MODE": "or",
    "PAIR_SOURCE_CLASS": "curve_surfacing.hypothesis.DrawingPairSource",

    # Lofting
    "LOFT_ROWS": None,
    "LOFT_MAX_ROWS": 32,
    "LOFT_MAX_COLUMNS": 24,
    "SUBDIV_LEVELS": 2,
    "FAIRING_TOLERANCE": 1e-10,
    "FAIRING_MAX_ITERATIONS": 20000,
    "FAIRING_CLAMP": True,

    # Occlusion reasoning
    "TAU_E": 3.0,
    "TAU_LOC": 2.0,
    "TAU_THETA": 0.3,
    "SUBSUME_FRAC": 0.8,
    "SUBSUME_EPS": 0.01,
    "KEEP_UNVERIFIABLE": True,
    "STRICT_ALL": False,
    "STRENGTH_WEIGHTED": False,
    "SURFACE_SAMPLES": 200,
    "RAY_TRACER_CLASS": "curve_surfacing.raytrace.BVHTracer",

    # Evaluation
    "EVAL_SAMPLES_PER_M2": 10000.0,
    "EVAL_MIN_SAMPLES": 10000,
    "EVAL_SEED": 0,
    "EVAL_TAUS": [0.005, 0.01, 0.02, 0.03, 0.05, 0.075, 0.1],

    # Synthetic scenes
    "FEATURE_ANGLE": 30.0,

    # Execution
    "THREADS": 1,
}

# List of settings that cannot be empty
MANDATORY = (
    "RESAMPLE_STEP",
    "RAY_TRACER_CLASS",
    "PAIR_SOURCE_CLASS",
    "TOPOLOGY_MODE",
)

# Settings given as dotted paths and resolved to the class they name
IMPORT_STRINGS = (
    "RAY_TRACER_CLASS",
    "PAIR_SOURCE_CLASS",
)

# Settings restricted to a fixed set of values
CHOICES = {
    "TOPOLOGY_MODE": ("or", "only", "off"),
}


def perform_import(val, setting_name):
    """
    Resolve a dotted path, or a list of them, to the named objects.
    Classes are passed through unchanged.
    """
    if isinstance(val, type):
        return val
    if isinstance(val, (list, tuple)):
        return [import_from_string(item, setting_name) for item in val]
    if isinstance(val, str) and "." in val:
        return import_from_string(val, setting_name)
    raise ImproperlyConfigured("%s must be a dotted path, got %r" % (setting_name, val))


def import_from_string(val, setting_name):
    module_path, _, name = val.rpartition(".")
    try:
        return getattr(importlib.import_module(module_path), name)
    except (ImportError, AttributeError) as e:
        raise ImportError("%s: cannot import %r (%s: %s)" % (setting_name, val, type(e).__name__, e))


class SurfacingSettings(object):
    """
    Attribute access to the CURVE_SURFACING dict. Values are looked up in the
    user settings, then in the defaults, checked, and cached until the next
    ``reload``; dotted paths in ``import_strings`` come back as classes.
    """

    def __init__(self, user_settings=None, defaults=None, import_strings=None, mandatory=None,
                 choices=None):
        if user_settings is not None:
            self._user_settings = user_settings
        self.defaults = defaults or {}
        self.import_strings = import_strings or ()
        self.mandatory = mandatory or ()
        self.choices = choices or {}
        self._cached_attrs = set()

    @property
    def user_settings(self):
        if not hasattr(self, "_user_settings"):
            self._user_settings = getattr(settings, "CURVE_SURFACING", None) or {}
        return self._user_settings

    def __getattr__(self, attr):
        if attr not in self.defaults:
            raise AttributeError("Unknown CURVE_SURFACING setting: %r" % attr)

        val = self.user_settings.get(attr, self.defaults[attr])
        self.validate_setting(attr, val)
        if val and attr in self.import_strings:
            val = perform_import(val, attr)

        self._cached_attrs.add(attr)
        setattr(self, attr, val)
        return val

    def validate_setting(self, attr, val):
        if not val and attr in self.mandatory:
            raise AttributeError("CURVE_SURFACING[%r] may not be empty" % attr)
        allowed = self.choices.get(attr)
        if allowed is not None and val not in allowed:
            raise ImproperlyConfigured("CURVE_SURFACING[%r] must be one of %s" % (attr, ", ".join(allowed)))

    def reload(self):
        for attr in self._cached_attrs:
            delattr(self, attr)
        self._cached_attrs.clear()
        if hasattr(self, "_user_settings"):
            delattr(self, "_user_settings")


surfacing_settings = SurfacingSettings(None, DEFAULTS, IMPORT_STRINGS, MANDATORY, CHOICES)


def reload_surfacing_settings(*args, **kwargs):
    if kwargs["setting"] == "CURVE_SURFACING":
        surfacing_settings.reload()


setting_changed.connect(reload_surfacing_settings)
