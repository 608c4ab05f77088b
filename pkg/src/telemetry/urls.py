"""Request-target parsing shared by the HTTP surface and the GPRS bridge."""
from urllib.parse import parse_qsl, urlsplit


def parse_request_target(url: str) -> tuple[str, dict[str, str]]:
    """(path, params) from an absolute URL or a bare `/path?query` target. Later duplicates win"""
    parts = urlsplit(url)
    path = parts.path or "/"
    return path, dict(parse_qsl(parts.query, keep_blank_values=True))


def parse_update_values(url: str) -> tuple[float | None, float | None]:
    """(field1, field2) from an update URL, None where absent or not numeric"""
    _path, params = parse_request_target(url)

    def _num(key: str) -> float | None:
        try:
            return float(params[key])
        except (KeyError, ValueError):
            return None

    return _num("field1"), _num("field2")
