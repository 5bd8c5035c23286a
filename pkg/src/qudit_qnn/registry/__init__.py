from qudit_qnn.registry.check_registry import CheckInfo, CheckRegistry
from qudit_qnn.registry.initialize_registry import initialize_registry

__all__ = ["CheckInfo", "CheckRegistry", "initialize_registry"]
