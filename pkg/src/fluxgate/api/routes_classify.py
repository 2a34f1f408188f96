from typing import List

from fastapi import APIRouter, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from fluxgate.api.handlers import ClassifyHandler
from fluxgate.dns.parser import RecordFormat

router = APIRouter()


# Request models
class ClassifyRequest(BaseModel):
    record: str
    format: RecordFormat = RecordFormat.JSON


class BatchRequest(BaseModel):
    records: List[str] = Field(min_length=1)
    format: RecordFormat = RecordFormat.JSON


def _handler(request: Request) -> ClassifyHandler:
    return ClassifyHandler(getattr(request.app.state, "detector", None))


@router.post("/classify")
def classify(body: ClassifyRequest, request: Request):
    """Classify one DNS response (JSON record or hex-encoded wire message)."""
    return JSONResponse(_handler(request).handle_classify(body.record, body.format))


@router.post("/classify/batch")
def classify_batch(body: BatchRequest, request: Request):
    """Classify many DNS responses; verdicts keep request order."""
    return JSONResponse(_handler(request).handle_batch(body.records, body.format))


@router.get("/model")
def model_info(request: Request):
    """Describe the loaded model and stores."""
    return JSONResponse(_handler(request).handle_model_info())
