"""Test the HTTP endpoints"""

import json

from fastapi.testclient import TestClient

from main import app

client = TestClient(app)

TEXT = b'the quick brown fox jumps over the lazy dog; ' * 300


def test_compress_and_decompress():
    response = client.post('/compress', files={'fileInput': ('fox.txt', TEXT)},
                           data={'codec': 'type2'})
    assert response.status_code == 200
    report = json.loads(response.headers['X-Compression-Report'])
    assert report['requested_codec'] == 'type2'
    assert report['symbols'] == len(TEXT)
    assert len(response.content) == report['compressed_bytes']
    restored = client.post('/decompress', files={'fileInput': ('fox.aeds', response.content)})
    assert restored.status_code == 200
    assert restored.content == TEXT


def test_bad_requests():
    response = client.post('/compress', files={'fileInput': ('fox.txt', TEXT)},
                           data={'codec': 'zstd'})
    assert response.status_code == 400
    assert 'zstd' in response.json()['error']
    response = client.post('/decompress', files={'fileInput': ('x.aeds', b'not a container')})
    assert response.status_code == 400
    assert 'error' in response.json()


def test_figures():
    response = client.get('/figures/table1')
    assert response.status_code == 200
    assert response.text.startswith('M,M_R,M_L\n73,57,16\n')
    assert client.get('/figures/figure-99').status_code == 404


def test_settings_and_documentation():
    defaults = client.get('/settings').json()
    assert defaults['codec'] in ('huffman', 'type1', 'type2', 'saeds-case1', 'saeds-case2',
                                 'saeds-case3', 'large-n', 'tans')
    assert defaults['block_size'] > 0
    response = client.get('/doc')
    assert response.status_code == 200
    assert '<h' in response.text
