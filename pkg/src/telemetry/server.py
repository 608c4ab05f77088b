"""HTTP surface of the telemetry service.

    GET/POST /update?api_key=K&field1=V1&field2=V2      body: entry id or 0
    GET /channels/<id>/feeds.json?results=N&start=&end=
    GET /channels/<id>/aggregate.json?bucket=minutes&n=1&stat=average&field=1
"""
import time
from collections.abc import Callable
from urllib.parse import parse_qsl

import uvicorn
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, PlainTextResponse
from rsxml import Logger
from starlette.exceptions import HTTPException as StarletteHTTPException

from .aggregate import AggregateQuery, aggregate
from .channel import ChannelNotFoundError, TelemetryService

Clock = Callable[[], int]


def monotonic_clock() -> Clock:
    """Milliseconds since the clock was created"""
    origin = time.monotonic()
    return lambda: int((time.monotonic() - origin) * 1000)


def _optional_int(params: dict[str, str], key: str) -> int | None:
    value = params.get(key)
    return None if value in (None, "") else int(value)


def create_app(service: TelemetryService, clock: Clock | None = None) -> FastAPI:
    """FastAPI application routing requests onto the shared service"""
    log = Logger('TelemetryHTTP')
    now = clock or monotonic_clock()
    app = FastAPI(title="pulse-sim telemetry")

    @app.exception_handler(StarletteHTTPException)
    async def http_error(_request: Request, exc: StarletteHTTPException):
        return JSONResponse({"error": str(exc.detail)}, status_code=exc.status_code)

    @app.exception_handler(ChannelNotFoundError)
    async def missing_channel(_request: Request, exc: ChannelNotFoundError):
        return JSONResponse({"error": exc.message}, status_code=404)

    @app.exception_handler(ValueError)
    async def bad_query(_request: Request, exc: ValueError):
        return JSONResponse({"error": str(exc)}, status_code=400)

    @app.exception_handler(RequestValidationError)
    async def bad_path(_request: Request, exc: RequestValidationError):
        return JSONResponse({"error": str(exc.errors()[0].get("msg", "invalid request"))}, status_code=400)

    @app.api_route("/update", methods=["GET", "POST"], response_class=PlainTextResponse)
    async def update(request: Request) -> str:
        params = dict(request.query_params)
        if request.method == "POST":
            body = (await request.body()).decode("utf-8")
            params.update(parse_qsl(body, keep_blank_values=True))
        entry_id = service.handle_update(params, now())
        log.debug(f"update from {request.client.host if request.client else '-'}: {entry_id}")
        return str(entry_id)

    @app.get("/channels/{channel_id}/feeds.json")
    def feeds(channel_id: int, request: Request) -> dict:
        params = dict(request.query_params)
        channel = service.channel(channel_id)
        entries = service.get_feed(
            channel_id,
            results=_optional_int(params, "results"),
            start_ms=_optional_int(params, "start"),
            end_ms=_optional_int(params, "end"),
        )
        return {"channel": channel.to_json(), "feeds": [e.to_feed_json() for e in entries]}

    @app.get("/channels/{channel_id}/aggregate.json")
    def aggregate_feed(channel_id: int, request: Request) -> dict:
        params = dict(request.query_params)
        q = AggregateQuery(
            bucket=params.get("bucket", "minutes"),
            statistic=params.get("stat", "average"),
            field=int(params.get("field", "1")),
            n=int(params.get("n", "1")),
            start_ms=_optional_int(params, "start"),
            end_ms=_optional_int(params, "end"),
        )
        points = aggregate(service, channel_id, q)
        return {
            "channel_id": channel_id,
            "field": q.field,
            "statistic": str(q.statistic),
            "bucket": str(q.bucket),
            "n": q.n,
            "points": [{"bucket_start_ms": start, "value": value} for start, value in points],
        }

    return app


def serve(service: TelemetryService, host: str = "127.0.0.1", port: int = 8080,
          clock: Clock | None = None) -> None:
    """Blocks serving the app with uvicorn until interrupted"""
    uvicorn.run(create_app(service, clock), host=host, port=port, log_level="warning")
