"""HTTP service wrapping the workbench core."""

from covrl.service.app import create_app

__all__ = ["create_app"]
