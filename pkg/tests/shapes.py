"""Hand-built tours and edge structures on the drawing-size instance
T'(24,18) with first retained index 9, used as fixtures."""
from tetratsp.instances import build_modified
from tetratsp.tours import Tour


def drawing_instance():
    return build_modified(24, 18, force=True, i0=9)


def _run(kind, start, stop):
    step = 1 if stop >= start else -1
    return [f"{kind}{i}" for i in range(start, stop + step, step)]


def four_trip_labels():
    """Tour with trips between c9/c10, c13/c14, a6/a7 and a16/a17."""
    seq = _run("c", 0, 9) + _run("e", 13, 16)
    seq += _run("c", 10, 13) + ["e17"] + _run("g", 16, 18) + _run("f", 17, 13)
    seq += _run("c", 14, 23) + _run("a", 0, 6) + _run("f", 9, 12)
    seq += _run("a", 7, 16) + _run("g", 15, 12) + _run("e", 12, 9) + _run("g", 9, 11)
    seq += _run("a", 17, 23) + _run("b", 0, 23)
    return seq


def four_trip_tour():
    inst = drawing_instance()
    return Tour(inst, tuple(inst.index(lab) for lab in four_trip_labels()))


def _path_edges(inst, labels):
    idx = [inst.index(lab) for lab in labels]
    return list(zip(idx, idx[1:]))


def two_trip_pseudo_tour_edges():
    """Two trips between c9 and c10, one between a6 and a7, every other
    consecutive base pair joined directly."""
    inst = drawing_instance()
    edges = []
    edges += _path_edges(inst, _run("b", 0, 24))          # C ... A
    edges += _path_edges(inst, _run("c", 0, 9))
    edges += _path_edges(inst, _run("c", 10, 24))         # ... B
    edges += _path_edges(inst, _run("a", 0, 6) + _run("f", 9, 12) + _run("a", 7, 24))
    edges += _path_edges(inst, ["c9"] + _run("e", 13, 18) + ["c10"])
    edges += _path_edges(inst, ["c9"] + _run("e", 9, 12) + _run("g", 9, 17) + _run("f", 17, 13) + ["c10"])
    return inst, edges
