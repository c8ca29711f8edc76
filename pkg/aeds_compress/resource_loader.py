# pylint: disable=missing-module-docstring
import json
from importlib.resources import files

from .codec import validate_aeds
from .errors import MalformedTable
from .model import AedsTable


class ResourceLoader:
    """ Class for loading the reference tables in the aeds_compress.data.tables
    directory. Tables are stored as JSON encoder rows of [codeword, next state]
    pairs and validated on first load.

    Available tables:
        - worked_example.json
    """
    __tables: dict[str, AedsTable] = {}

    @staticmethod
    def list_tables() -> list[str]:
        return sorted(
            entry.name.removesuffix('.json')
            for entry in files("aeds_compress.data.tables").iterdir()
            if entry.name.endswith('.json')
        )

    @staticmethod
    def get_table(name: str) -> AedsTable:
        if name not in ResourceLoader.__tables:
            ResourceLoader.__tables[name] = ResourceLoader.__load_table(name)
        return ResourceLoader.__tables[name]

    @staticmethod
    def __load_table(name: str) -> AedsTable:
        if name not in ResourceLoader.list_tables():
            raise MalformedTable(f"no reference table named {name!r}")
        with files("aeds_compress.data.tables").joinpath(f"{name}.json") \
                .open(encoding='utf-8') as file:
            table_data = json.load(file)
        table = AedsTable.from_encoder(
            table_data['symbols'],
            [[(bits, nxt) for bits, nxt in row] for row in table_data['encoder']],
            kind=table_data.get('kind', 'generic'),
            names=table_data.get('names', ()),
        )
        validate_aeds(table)
        return table
