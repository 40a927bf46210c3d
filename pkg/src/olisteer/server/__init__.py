from olisteer.server.app import create_app, snapshot_payload

__all__ = ["create_app", "snapshot_payload"]
