# app.py - HTTP surface over the sharpening and cone-unmixing pipeline

import logging
from contextlib import asynccontextmanager
from datetime import datetime, timezone

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from store.config import check_storage_health, get_settings, validate_env_vars

from routers.eval_router import router as eval_router
from routers.lorentzian_router import router as lorentzian_router
from routers.sharpen_router import router as sharpen_router
from routers.synth_router import router as synth_router
from routers.unmix_router import router as unmix_router

SERVICE_NAME = "peaksharp"
VERSION = "1.0.0"

logger = logging.getLogger(__name__)


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%d %H:%M:%S")


@asynccontextmanager
async def lifespan(app: FastAPI):
    settings = get_settings()
    print("\n" + "=" * 80)
    print("🚀 PEAKSHARP SEPARATION SERVICE - STARTUP")
    print("=" * 80)

    print("📋 SERVICE INFORMATION:")
    print(f"   🏷️  Name: {SERVICE_NAME}")
    print(f"   📦 Version: {VERSION}")
    print(f"   📅 Started: {_now()} UTC")

    print("\n🔧 ENVIRONMENT VALIDATION:")
    try:
        validate_env_vars()
        print("   ✅ Environment variables validated")
    except ValueError as e:
        print(f"   ❌ Environment validation failed: {e}")
    print(f"   🧵 Worker threads: {'auto' if settings.threads == 0 else settings.threads}")

    print("\n📁 RUN STORAGE:")
    storage = check_storage_health(settings)
    if storage["status"] == "writable":
        print(f"   ✅ {storage['data_dir']} is writable")
    else:
        print(f"   ⚠️  {storage['data_dir']} is not writable: {storage.get('error')}")

    print("\n🛠️  AVAILABLE ENDPOINTS:")
    print("   📐 Lorentzian bounds: /lorentzian/*")
    print("   🔪 Sharpening: /sharpen, /sharpen/upload")
    print("   🧪 Unmixing: /unmix")
    print("   🎲 Synthesis: /synth")
    print("   📊 Evaluation: /eval/comon, /eval/report")
    print("   🏥 Health Checks: /health")

    print("\n" + "=" * 80)
    print(f"✅ Ready on http://{settings.host}:{settings.port} (docs at /docs)")
    print("=" * 80 + "\n")

    yield

    print(f"\n🔄 {SERVICE_NAME} stopped at {_now()} UTC\n")


app = FastAPI(
    title="PeakSharp Separation Service",
    description="Lorentzian peak sharpening and convex-cone blind source separation for NMR-like spectra",
    version=VERSION,
    docs_url="/docs",
    redoc_url="/redoc",
    openapi_url="/openapi.json",
    lifespan=lifespan,
    license_info={"name": "MIT License", "url": "https://opensource.org/licenses/MIT"},
)

cors_origins = get_settings().cors_origins or ["http://localhost:3000", "http://127.0.0.1:3000"]

app.add_middleware(
    CORSMiddleware,
    allow_origins=cors_origins,
    allow_credentials=True,
    allow_methods=["GET", "POST", "OPTIONS"],
    allow_headers=["*"],
)

app.include_router(lorentzian_router)
app.include_router(sharpen_router)
app.include_router(unmix_router)
app.include_router(synth_router)
app.include_router(eval_router)


@app.get("/health", tags=["Health Checks"])
async def health_check():
    """Service health, including whether the run output directory is writable"""
    storage = check_storage_health()
    return {
        "status": "healthy" if storage["status"] == "writable" else "degraded",
        "service": SERVICE_NAME,
        "version": VERSION,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "storage": storage,
    }


@app.get("/info", tags=["Service Information"])
async def service_info():
    settings = get_settings()
    return {
        "service": SERVICE_NAME,
        "version": VERSION,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "threads": settings.threads,
        "data_dir": str(settings.data_dir),
        "endpoints": {
            "lorentzian": {"bounds": "/lorentzian/bounds", "evaluate": "/lorentzian/evaluate"},
            "sharpen": {"json": "/sharpen", "upload": "/sharpen/upload"},
            "unmix": "/unmix",
            "synth": "/synth",
            "eval": {"comon": "/eval/comon", "report": "/eval/report"},
        },
        "methods": ["nn", "nnp"],
        "recovery_modes": ["auto", "nnls", "l1", "pinv"],
        "documentation": {"swagger_ui": "/docs", "redoc": "/redoc", "openapi_json": "/openapi.json"},
    }


@app.get("/", tags=["Service Information"])
async def root():
    return {
        "message": "🚀 PeakSharp - peak sharpening and nonnegative blind source separation",
        "service": SERVICE_NAME,
        "version": VERSION,
        "status": "operational",
        "quick_links": {"documentation": "/docs", "health_check": "/health", "service_info": "/info"},
        "getting_started": {
            "1": "🎲 Generate a scenario: POST /synth",
            "2": "🔪 Sharpen mixtures: POST /sharpen",
            "3": "🧪 Separate sources: POST /unmix",
            "4": "📊 Score the estimate: POST /eval/report",
        },
    }


if __name__ == "__main__":
    import uvicorn

    settings = get_settings()
    print(f"\n🚀 Starting {SERVICE_NAME}...")
    print(f"📍 Host: {settings.host}:{settings.port}")
    print(f"📖 Documentation: http://localhost:{settings.port}/docs")

    uvicorn.run(app, host=settings.host, port=settings.port,
                log_level=settings.log_level.lower(), access_log=True)
