"""Lattice path polymatroids and matroids, their symmetric exchange graphs,
and audits of the toric ideal generated by exchange binomials."""

from .monomial import *  # noqa: F401,F403
from .lattice import *  # noqa: F401,F403
from .order import *  # noqa: F401,F403
from .polymatroid import *  # noqa: F401,F403
from .exchange import *  # noqa: F401,F403
from .toric import *  # noqa: F401,F403
from .toric import degree_two_spanning, replay_reduction  # noqa: F401
from .audit import (  # noqa: F401
    groebner_report,
    order_audit,
    replay_fiber_dump,
    replay_spair_example,
    sweep_report,
)
from .render import emit_dot, render_paths_svg  # noqa: F401

__version__ = "0.1.0"
