"""Trace-driven discrete-event simulator of a FaaS platform with predictive-validation tools."""

__version__ = "0.1.0"

from .engine import (  # noqa: E402
    Replica,
    ResponseRecord,
    SimulationConfig,
    SimulationResult,
    acquire_trace,
    expire_idle_replicas,
    run_simulation,
    select_available_replica,
)
from .errors import (  # noqa: E402
    ConfigurationError,
    DegenerateSampleError,
    FaasSimError,
    FormatError,
    InputError,
    ParameterError,
)
from .traces import ReplicaTrace, TraceEntry, TraceFile, next_entry  # noqa: E402
from .workload import (  # noqa: E402
    ArrivalModel,
    ArrivalSchedule,
    exponential_interarrivals,
    poisson_interarrivals,
    synth_trace,
)
