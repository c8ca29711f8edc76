"""Router module defining endpoints for compressing and decompressing files"""


import json
from typing import Annotated, Optional

from fastapi import APIRouter, Depends, File, Form, HTTPException, UploadFile
from starlette.responses import JSONResponse, PlainTextResponse, Response

from aeds_compress.errors import UnknownFigure
from aeds_compress.figures import figure_csv, figure_data
from src.settings import get_settings, Settings
from src.util import Utils

router = APIRouter(tags=['Compress and decompress files'])
utils = Utils()


@router.post("/compress", response_class=Response)
async def post_compress(
        file_input: Annotated[UploadFile, File(alias='fileInput')],
        codec: Annotated[Optional[str], Form()] = None,
        states: Annotated[Optional[int], Form()] = None
) -> Response:
    """
    Compress an uploaded file and return the container.
    The compression report is sent in the X-Compression-Report header.
    """
    data = await utils.read_upload(file_input)
    compressor = utils.get_compressor(codec, states)
    result = utils.compress(compressor, data, file_input.filename)
    return Response(
        content=result.container,
        media_type='application/octet-stream',
        headers={'X-Compression-Report': json.dumps(result.report)}
    )


@router.post("/decompress", response_class=Response)
async def post_decompress(
        file_input: Annotated[UploadFile, File(alias='fileInput')],
        table_input: Annotated[Optional[UploadFile], File(alias='tableInput')] = None
) -> Response:
    """
    Restore a compressed container, with an optional side table
    """
    data = await utils.read_upload(file_input)
    table = await utils.read_upload(table_input) if table_input is not None else None
    restored = utils.decompress(data, table, file_input.filename)
    return Response(content=restored, media_type='application/octet-stream')


@router.get("/figures/{figure_id}", response_class=PlainTextResponse, status_code=200)
async def get_figure_csv(figure_id: str) -> PlainTextResponse:
    """
    Numeric series behind a figure or table, as CSV
    """
    try:
        data = figure_data(figure_id)
    except UnknownFigure as exc:
        raise HTTPException(status_code=404, detail=str(exc)) from exc
    return PlainTextResponse(figure_csv(data), media_type='text/csv')


@router.get("/settings", response_class=JSONResponse, status_code=200)
async def get_codec_settings(
        conf: Annotated[Settings, Depends(get_settings)]
) -> JSONResponse:
    """
    Codec defaults used by the service
    """
    return JSONResponse(conf.cli_defaults())
