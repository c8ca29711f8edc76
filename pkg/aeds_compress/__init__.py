"""Table-driven lossless compression with asymmetric encoding-decoding schemes"""

from .codec import decode, deserialize_table, encode, serialize_table, validate_aeds
from .compressor import Compressor
from .constructors import (
    build_huffman_matching_saeds, build_large_n, build_saeds_case1, build_saeds_case2,
    build_saeds_case3, build_type1, build_type2
)
from .errors import AedsError
from .model import AedsTable, SourceDistribution, validate_distribution
from .prefix_codes import build_huffman
from .tans import build_tans, tans_decode, tans_encode, tans_to_aeds

__all__ = [
    'AedsError', 'AedsTable', 'Compressor', 'SourceDistribution', 'build_huffman',
    'build_huffman_matching_saeds', 'build_large_n', 'build_saeds_case1', 'build_saeds_case2',
    'build_saeds_case3', 'build_tans', 'build_type1', 'build_type2', 'decode',
    'deserialize_table', 'encode', 'serialize_table', 'tans_decode', 'tans_encode',
    'tans_to_aeds', 'validate_aeds', 'validate_distribution',
]
