"""
Standalone entry point: runs the management commands without a Django project.

    curve-surfacing pipeline --config run.json --threads 4

Pipeline settings can be given as a JSON object in ``CURVE_SURFACING_SETTINGS``.
"""
import json
import os
import sys

import django
from django.conf import settings
from django.core.exceptions import ImproperlyConfigured
from django.core.management import ManagementUtility

from .log import DEFAULT_LOGGING
from .management.base import EXIT_CONFIG


SETTINGS_ENV = "CURVE_SURFACING_SETTINGS"


def settings_from_env(environ=None):
    environ = os.environ if environ is None else environ
    raw = environ.get(SETTINGS_ENV, "{}")
    try:
        overrides = json.loads(raw)
    except ValueError as e:
        raise ImproperlyConfigured("%s is not valid JSON: %s" % (SETTINGS_ENV, e))
    if not isinstance(overrides, dict):
        raise ImproperlyConfigured("%s must be a JSON object" % SETTINGS_ENV)
    return overrides


def configure(overrides=None):
    if overrides is None:
        overrides = settings_from_env()
    if settings.configured:
        return
    settings.configure(
        INSTALLED_APPS=["curve_surfacing"],
        LOGGING=DEFAULT_LOGGING,
        CURVE_SURFACING=overrides,
    )
    django.setup()


def main(argv=None):
    argv = list(sys.argv if argv is None else argv)
    try:
        configure()
    except ImproperlyConfigured as e:
        sys.stderr.write("configuration error: %s\n" % e)
        sys.exit(EXIT_CONFIG)
    ManagementUtility(argv).execute()


if __name__ == "__main__":
    main()
