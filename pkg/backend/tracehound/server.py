#!/usr/bin/env python3
"""
FastAPI backend for tracehound
"""

import os

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from tracehound import __version__
from tracehound.config.env import load_env_files
from tracehound.routes import analysis

load_env_files()

app = FastAPI(title="tracehound API", version=__version__)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(analysis.router, tags=["analysis"])


@app.exception_handler(RequestValidationError)
async def _malformed_request(request: Request, exc: RequestValidationError):
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.get("/health")
async def health_check():
    """Health check endpoint"""
    return {"status": "ok", "version": __version__}


if __name__ == "__main__":
    import uvicorn

    port = int(os.getenv("PORT", "8000"))
    uvicorn.run("tracehound.server:app", host="0.0.0.0", port=port)
