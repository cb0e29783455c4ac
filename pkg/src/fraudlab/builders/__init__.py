from fraudlab.builders.group_builder import GroupBuilder
from fraudlab.builders.map_builder import MapBuilder

__all__ = ["GroupBuilder", "MapBuilder"]
