from ._trajdw import (
    canned_query,
    haversine_distance,
    point_in_polygon,
    query,
    run_pipeline,
    schema_descriptor,
)

__all__ = [
    "canned_query",
    "haversine_distance",
    "point_in_polygon",
    "query",
    "run_pipeline",
    "schema_descriptor",
]
