"""HTTP ingestion service around :class:`driftwatch.monitor.MonitorEngine`."""

from .app import create_app
from .config import ServiceConfig, load_service_config

__all__ = ["create_app", "ServiceConfig", "load_service_config"]
