from django.apps import AppConfig


class CurveSurfacingConfig(AppConfig):
    name = "curve_surfacing"
    verbose_name = "Curve Drawing Surfacing"
