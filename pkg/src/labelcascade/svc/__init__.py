"""Service and command-line surface."""

from labelcascade.svc.service import LabelingService, ServiceConfig

__all__ = ["LabelingService", "ServiceConfig"]
