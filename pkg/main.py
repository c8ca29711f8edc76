"""Main module for FastAPI service"""


import logging

import markdown
from fastapi import FastAPI, APIRouter
from fastapi.responses import HTMLResponse
from starlette.exceptions import HTTPException as StarletteHTTPException
from starlette.middleware.cors import CORSMiddleware
from starlette.requests import Request
from starlette.responses import JSONResponse, Response

from src.routes import compress
from src.settings import get_settings
from src.util import Utils

logging.basicConfig(level=get_settings().LOG_LEVEL)

SWAGGER_URL = f"{Utils.get_environment_prefix()}/swagger-ui"
allowed_origins = ["http://localhost", "http://127.0.0.1"]

app = FastAPI(
    title="AEDS compress",
    description="API documentation for AEDS compress",
    docs_url=SWAGGER_URL,
    openapi_url=f"{Utils.get_environment_prefix()}/openapi.json"
)
app.add_middleware(CORSMiddleware, allow_origins=allowed_origins, allow_methods=["GET", "POST"])

router = APIRouter(prefix=Utils.get_environment_prefix())
router.include_router(compress.router)
app.include_router(router=router)


@app.get(f"{Utils.get_environment_prefix()}/doc", tags=["Documentation"],
         response_class=HTMLResponse)
def get_documentation() -> Response:
    doc_text = "\n"
    with open("DOC.md", encoding="UTF-8") as infile:
        for line in infile:
            doc_text += line
    return HTMLResponse(markdown.markdown(doc_text, extensions=['tables']))


@app.exception_handler(StarletteHTTPException)
def display_error_message(_request: Request, exc: StarletteHTTPException) -> Response:
    return JSONResponse({'error': str(exc.detail)}, status_code=exc.status_code)
