ADMINS = ()

MANAGERS = ADMINS

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": ":memory:",
    }
}

ALLOWED_HOSTS = []

TIME_ZONE = "UTC"

LANGUAGE_CODE = "en-us"

USE_I18N = True
USE_TZ = True

SECRET_KEY = "1234567890surfacing"

INSTALLED_APPS = (
    "django.contrib.contenttypes",

    "curve_surfacing",
)

CURVE_SURFACING = {
    "THREADS": 1,
    "EVAL_MIN_SAMPLES": 2000,
    "EVAL_SAMPLES_PER_M2": 2000.0,
}

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "simple": {
            "format": "%(levelname)s %(message)s"
        },
        "jsonl": {
            "()": "curve_surfacing.log.JSONLineFormatter"
        },
    },
    "handlers": {
        "console": {
            "level": "DEBUG",
            "class": "logging.StreamHandler",
            "formatter": "simple"
        },
        "null": {
            "level": "DEBUG",
            "class": "logging.NullHandler",
        },
    },
    "loggers": {
        "curve_surfacing": {
            "handlers": ["null"],
            "level": "DEBUG",
            "propagate": True,
        },
    }
}
