import dataclasses
import json
from pathlib import Path

from django.core.exceptions import ImproperlyConfigured

from .settings import surfacing_settings


class SettingsParams(object):
    """
    Mixin for parameter dataclasses whose defaults live in ``surfacing_settings``.

    Subclasses map field names to setting names in ``setting_names``; fields
    missing from the map have plain dataclass defaults.
    """
    setting_names = {}

    @classmethod
    def from_settings(cls, **overrides):
        values = {
            name: getattr(surfacing_settings, setting)
            for name, setting in cls.setting_names.items()
        }
        values.update(overrides)
        params = cls(**values)
        params.validate()
        return params

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ImproperlyConfigured(
                "Unknown %s fields: %s" % (cls.__name__, ", ".join(sorted(unknown)))
            )
        return cls.from_settings(**data)

    @classmethod
    def from_file(cls, path):
        if path is None:
            return cls.from_settings()
        with Path(path).open() as fp:
            return cls.from_dict(json.load(fp))

    def to_dict(self):
        return dataclasses.asdict(self)

    def validate(self):
        pass

    def require(self, condition, message):
        if not condition:
            raise ImproperlyConfigured("%s: %s" % (self.__class__.__name__, message))
