"""Spiking-neuron pulse shape discrimination.

A tempotron — a leaky integrate-and-fire neuron with one trainable
efficacy per dendrite — classifies radiation detector pulses as neutron
or gamma directly from their spike-encoded waveforms, alongside the
classical discrimination methods it is compared against.
"""

from .augment import (
    AugmentConfig,
    augment_add_miss,
    augment_gaussian,
    augment_jitter,
)
from .baselines import (
    METHODS,
    BaselineConfig,
    FactorSeries,
    classify_by_valley,
    factor,
    factor_series,
    figure_of_merit,
    histogram,
    write_factor_csv,
)
from .encoding import (
    GrfBank,
    LatencyTrain,
    SpikePattern,
    SpikePatternBatch,
    dump_pattern,
    encode_dataset,
    encode_grf,
    encode_latency,
    encode_pulse,
    encode_samples,
)
from .errors import TempotronError
from .metrics import EvalReport, agreement, evaluate, export_report
from .neuron import (
    KernelParams,
    MembraneTrace,
    TempotronModel,
    batch_traces,
    classify,
    classify_batch,
    kernel_value,
    load_model,
    make_kernel,
    membrane_trace,
    peak_potentials,
    save_model,
)
from .pulses import (
    GAMMA,
    NEUTRON,
    Dataset,
    Pulse,
    SyntheticConfig,
    generate_synthetic,
    load_dataset,
    normalize,
    normalize_dataset,
    save_dataset,
    with_seed,
)
from .seeding import rng_stream
from .training import (
    TrainConfig,
    TrainLog,
    delta_omega,
    lr_schedule,
    momentum_update,
    psp_probe,
    snapshot_efficacies,
    train,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
