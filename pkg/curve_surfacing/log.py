import json
import logging


class JSONLineFormatter(logging.Formatter):
    """
    Render each record as one JSON object per line.

    Use it from a Django ``LOGGING`` dict:

        "formatters": {
            "jsonl": {"()": "curve_surfacing.log.JSONLineFormatter"},
        }

    Extra attributes passed with ``extra={"stage": ...}`` are kept when they
    belong to ``EXTRA_FIELDS``.
    """
    EXTRA_FIELDS = ("stage", "hypothesis", "view", "fragment", "count")

    def format(self, record):
        payload = {
            "time": self.formatTime(record, "%Y-%m-%dT%H:%M:%S"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        for key in self.EXTRA_FIELDS:
            if hasattr(record, key):
                payload[key] = getattr(record, key)
        if record.exc_info:
            payload["exception"] = self.formatException(record.exc_info)
        return json.dumps(payload, sort_keys=True, default=str)


DEFAULT_LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "jsonl": {"()": "curve_surfacing.log.JSONLineFormatter"},
    },
    "handlers": {
        "console": {
            "level": "INFO",
            "class": "logging.StreamHandler",
            "formatter": "jsonl",
        },
    },
    "loggers": {
        "curve_surfacing": {
            "handlers": ["console"],
            "level": "INFO",
            "propagate": False,
        },
    },
}
