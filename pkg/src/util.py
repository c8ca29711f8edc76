"""Module for utility classes and methods used in FastAPI service"""


# pylint: disable=broad-exception-caught

import logging
from typing import Optional

from fastapi import HTTPException
from starlette.datastructures import UploadFile

from aeds_compress.compressor import CODECS, CompressionResult, Compressor
from aeds_compress.errors import AedsError
from src.settings import get_settings

logger = logging.getLogger(__name__)


class Utils:
    """Helper methods for API endpoints"""

    @staticmethod
    def get_environment_prefix() -> str:
        if get_settings().ENVIRONMENT not in ["stage", "prod"]:
            return ""
        return get_settings().CUSTOM_PATH or "/aeds"

    @staticmethod
    def get_compressor(codec: Optional[str], states: Optional[int]) -> Compressor:
        conf = get_settings()
        codec = codec or conf.DEFAULT_CODEC
        if codec not in CODECS:
            raise HTTPException(status_code=400, detail=f"Unknown codec {codec}")
        try:
            return Compressor(
                codec, states or conf.DEFAULT_STATES,
                block_size=conf.BLOCK_SIZE,
                state_budget=conf.STATE_BUDGET,
                tolerance=conf.TOLERANCE,
                direct_max_states=conf.DIRECT_SOLVE_MAX_STATES,
                power_iter_max=conf.POWER_ITER_MAX,
                refine_passes=conf.LARGE_N_REFINE_PASSES,
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @staticmethod
    async def read_upload(file: Optional[UploadFile]) -> bytes:
        size_limit = int(get_settings().MAX_FILE_SIZE_MB)
        if not file:
            raise HTTPException(status_code=400, detail="No file provided")
        if size_limit and file.size is not None and file.size > size_limit * 1024 * 1024:
            raise HTTPException(status_code=400, detail="File too large")
        return await file.read()

    @staticmethod
    def compress(compressor: Compressor, data: bytes, filename: Optional[str]) -> CompressionResult:
        try:
            return compressor.compress(data)
        except AedsError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except Exception as exc:
            logger.exception("Error while compressing %s", filename)
            raise HTTPException(detail=f'Error while compressing file {filename}',
                                status_code=500) from exc

    @staticmethod
    def decompress(data: bytes, table: Optional[bytes], filename: Optional[str]) -> bytes:
        try:
            return Compressor.decompress(data, table)
        except AedsError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except Exception as exc:
            logger.exception("Error while decompressing %s", filename)
            raise HTTPException(detail=f'Error while decompressing file {filename}',
                                status_code=500) from exc
