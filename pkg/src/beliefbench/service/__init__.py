"""Study service: persistent store plus the HTTP application."""

from .app import app_from_env, create_app, env_settings
from .store import ConditionDef, DatasetDef, StudyConfig, StudyStore

__all__ = [
    "ConditionDef",
    "DatasetDef",
    "StudyConfig",
    "StudyStore",
    "app_from_env",
    "create_app",
    "env_settings",
]
