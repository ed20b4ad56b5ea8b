from ._tractdyn import (
    Atlas,
    BottcherMap,
    KoenigsLinearizer,
    Polynomial,
    Tract,
    TractdynError,
    bowen_zero_poly,
    preimages,
    set_thread_count,
    thread_count,
    tree_pressure,
    verify,
)

__all__ = [
    "Atlas",
    "BottcherMap",
    "KoenigsLinearizer",
    "Polynomial",
    "Tract",
    "TractdynError",
    "bowen_zero_poly",
    "preimages",
    "set_thread_count",
    "thread_count",
    "tree_pressure",
    "verify",
]
