"""Simple script to run the compressor on local files

usage: `python run_on_file.py compress --input /path/to/file --output /path/to/file.aedc \
   [--codec <codec>] [--states <N>] [--table-out </path/to/table>]`
       `python run_on_file.py decompress --input /path/to/file.aedc --output /path/to/file`
       `python run_on_file.py figures --figure table1 [--csv table1.csv]`

Defaults come from the .env file, see .env.example.
"""


import logging
import sys

from aeds_compress import cli
from src.settings import get_settings


logging.basicConfig(level=get_settings().LOG_LEVEL)
sys.exit(cli.main(defaults=get_settings().cli_defaults()))
