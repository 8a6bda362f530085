"""resokit: design and extraction toolkit for SHF microacoustic resonators.

Modules:
  mbvd        - lumped MBVD resonator model, metrics and inverse design
  extraction  - damped least-squares fit of MBVD elements to traces
  acoustic1d  - transfer-matrix stacks, Bloch stop-bands, transmission
  ladder      - ladder filter synthesis and S-parameter evaluation
  touchstone  - Touchstone v1 file I/O
  config      - text configuration of materials, stacks and targets
"""

from .errors import (
    NoResonanceError,
    NumericsError,
    ParseError,
    PassbandUnresolvedError,
    ResokitError,
    ValidationError,
)
from .mbvd import (
    DEFAULT_KT2_DEFINITION,
    Kt2Definition,
    MbvdParams,
    ResonatorMetrics,
    from_targets,
    kt2_from_freqs,
    metrics,
    resonance_freqs,
    synth_admittance,
)
from .extraction import (
    AdmittanceTrace,
    FitOptions,
    FitResult,
    extract_mbvd,
    fit_mbvd,
    initial_guess,
    s11_to_admittance,
)
from .acoustic1d import (
    BlochResult,
    Layer,
    Segment,
    StopBand,
    UnitCellGeometry,
    bloch,
    cell_matrix,
    find_stop_bands,
    geometry_to_segments,
    stack_matrix,
    te_resonance,
    transmission,
)
from .ladder import (
    FilterMetrics,
    LadderResponse,
    LadderSpec,
    SweepRow,
    design_ladder,
    evaluate_design,
    filter_metrics,
    kt2_sweep,
    ladder_response,
)
from .touchstone import (
    TouchstoneRecord,
    parse_touchstone,
    record_from_s11,
    record_from_two_port,
    write_touchstone,
)
from .config import DesignConfig, FilterParams, ResonatorTargets, load_config, parse_config
from .materials import DEFAULT_MATERIALS, Material, make_layer, reference_unit_cell

__version__ = "0.1.0"
