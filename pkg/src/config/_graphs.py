import re
from typing import Callable, Dict, List

_builtin: List[str] = [
    "bubble",
    "triangle",
    "box",
    "pentagon",
    "hexagon",
    "sunrise",
    "triangle-m1",
    "triangle-m12",
    "triangle-massless",
    "bubble-m1",
]

_CYCLE = re.compile(r"^cycle(\d+)$")


def _factories() -> Dict[str, Callable]:
    # graphkin depends on config, so the constructors load on first lookup
    from graphkin import cycle_graph, sunrise_graph, triangle_graph

    return {
        "bubble": lambda: cycle_graph(2, name="bubble"),
        "bubble-m1": lambda: cycle_graph(2, masses=[None, "m2"], name="bubble-m1"),
        "triangle": lambda: triangle_graph(),
        "triangle-m1": lambda: triangle_graph([None, "m2", "m3"], name="triangle-m1"),
        "triangle-m12": lambda: triangle_graph([None, None, "m3"], name="triangle-m12"),
        "triangle-massless": lambda: triangle_graph([None, None, None], name="triangle-massless"),
        "box": lambda: cycle_graph(4, name="box"),
        "pentagon": lambda: cycle_graph(5, name="pentagon"),
        "hexagon": lambda: cycle_graph(6, name="hexagon"),
        "sunrise": lambda: sunrise_graph(),
    }


class _Graphs:
    """Built-in graphs by case-insensitive name; `cycle<N>` builds an N-gon."""

    def __getattr__(self, key: str):
        if key.startswith("__"):
            raise AttributeError(key)
        return self[key.replace("_", "-")]

    def __getitem__(self, item: str):
        item = item.lower()
        match = _CYCLE.match(item)
        if match:
            from graphkin import cycle_graph

            return cycle_graph(int(match.group(1)))
        factories = _factories()
        if item not in factories:
            raise KeyError(f"no built-in graph named {item}")
        return factories[item]()

    def __contains__(self, item: str) -> bool:
        item = item.lower()
        return item in _builtin or bool(_CYCLE.match(item))

    def names(self) -> List[str]:
        return list(_builtin)


graphs = _Graphs()

__all__ = ["graphs"]
