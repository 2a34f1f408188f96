from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from fluxgate import __version__
from fluxgate.api.routes_classify import router as classify_router
from fluxgate.core import settings
from fluxgate.core.errors import FluxgateError
from fluxgate.core.logging_config import logger, setup_standard_logging_interception
from fluxgate.pipeline.detector import Detector

# Setup logging interception for uvicorn and fastapi
setup_standard_logging_interception()


def load_detector_from_env():
    """Detector from FLUXGATE_MODEL_PATH / _CENSYS_DB / _GEO_DB, or None if unset."""
    model_path = settings.model_path()
    censys_path = settings.censys_db_path()
    geo_path = settings.geo_db_path()
    if not (model_path and censys_path and geo_path):
        logger.warning("FLUXGATE_MODEL_PATH, FLUXGATE_CENSYS_DB or FLUXGATE_GEO_DB unset; no model loaded")
        return None
    return Detector.from_files(model_path, censys_path, geo_path, known_path=settings.known_domains_path())


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Load stores and model once at startup."""
    logger.info("🚀 fluxgate API is starting up...")
    try:
        if getattr(app.state, "detector", None) is None:
            try:
                app.state.detector = load_detector_from_env()
            except FluxgateError as e:
                logger.error(f"Could not load detector: {e}")
                app.state.detector = None
        if app.state.detector is not None:
            logger.success(f"Serving {app.state.detector!r}")
        yield
    finally:
        logger.info("🛑 fluxgate API is shutting down...")


# Initialize app
app = FastAPI(
    title="fluxgate API",
    version=__version__,
    description="Fast-flux domain detection from single DNS responses",
    lifespan=lifespan,
)

# Enable CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(classify_router, prefix="/api", tags=["Classification"])


@app.get("/")
def root():
    """API root."""
    detector = getattr(app.state, "detector", None)
    return {
        "message": "fluxgate - fast-flux domain detection",
        "version": __version__,
        "model_loaded": detector is not None,
        "endpoints": {
            "classify": "/api/classify",
            "batch": "/api/classify/batch",
            "model": "/api/model",
        },
        "docs": "/docs",
    }


if __name__ == "__main__":
    import uvicorn

    uvicorn.run("fluxgate.api.main:app", host="0.0.0.0", port=8008)
