"""Test the packaged reference tables"""

import pytest

from aeds_compress.errors import MalformedTable
from aeds_compress.resource_loader import ResourceLoader


def test_list_tables():
    assert 'worked_example' in ResourceLoader.list_tables()


def test_worked_example_table():
    table = ResourceLoader.get_table('worked_example')
    assert table.kind == 'worked-example'
    assert table.symbols == ('a', 'b', 'c')
    assert table.num_states == 5
    assert [table.state_name(x) for x in range(5)] == ['α1', 'α2', 'α3', 'α4', 'α5']
    assert table.encode_step(0, 'c').codeword.bits == '00'
    assert ResourceLoader.get_table('worked_example') is table


def test_unknown_table():
    with pytest.raises(MalformedTable):
        ResourceLoader.get_table('no_such_table')
