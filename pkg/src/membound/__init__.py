"""Memory-bounded first-order convex optimization: quantized-state reference
algorithms, the encoder/decoder oracle harness that enforces the bit
bottleneck, and executable verifiers for the packing / output-cardinality
lower-bound machinery."""

from .algorithms import (
    CoMConfig,
    GDConfig,
    com_config,
    com_covering_bound_bits,
    constant_algorithm,
    gd_config,
    gd_covering_bound_bits,
    make_com,
    make_gd,
    replay_centroids,
    truncate_algorithm,
)
from .geometry import (
    CutSet,
    DegenerateBodyError,
    Halfspace,
    PackingSet,
    estimate_centroid,
    estimate_volume_fraction,
    greedy_packing,
    spawn_rng,
    spawn_seed,
)
from .instances import (
    ConvexInstance,
    adversarial_subgradient_selector,
    check_instance,
    make_distance_instance,
    make_hard_family,
    make_max_affine_instance,
    parse_instance_token,
    standard_corpus,
)
from .protocol import (
    AlgorithmSpec,
    FirstOrderReply,
    MemoryState,
    Transcript,
    count_distinct_outputs,
    run,
)
from .quantization import (
    ScalarCodec,
    VectorCodec,
    decode_scalar,
    decode_vector,
    encode_scalar,
    encode_vector,
    make_scalar_codec,
    make_vector_codec,
)
from .experiments import TradeoffRecord, run_cell, run_single, sweep
from .verifier import (
    CheckReport,
    verify_cardinality_bound,
    verify_grunbaum,
    verify_packing_bound,
    verify_separation,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmSpec",
    "CheckReport",
    "CoMConfig",
    "ConvexInstance",
    "CutSet",
    "DegenerateBodyError",
    "FirstOrderReply",
    "GDConfig",
    "Halfspace",
    "MemoryState",
    "PackingSet",
    "ScalarCodec",
    "TradeoffRecord",
    "Transcript",
    "VectorCodec",
    "adversarial_subgradient_selector",
    "check_instance",
    "com_config",
    "com_covering_bound_bits",
    "constant_algorithm",
    "count_distinct_outputs",
    "decode_scalar",
    "decode_vector",
    "encode_scalar",
    "encode_vector",
    "estimate_centroid",
    "estimate_volume_fraction",
    "gd_config",
    "gd_covering_bound_bits",
    "greedy_packing",
    "make_com",
    "make_distance_instance",
    "make_gd",
    "make_hard_family",
    "make_max_affine_instance",
    "make_scalar_codec",
    "make_vector_codec",
    "parse_instance_token",
    "replay_centroids",
    "run",
    "run_cell",
    "run_single",
    "spawn_rng",
    "spawn_seed",
    "standard_corpus",
    "sweep",
    "truncate_algorithm",
    "verify_cardinality_bound",
    "verify_grunbaum",
    "verify_packing_bound",
    "verify_separation",
]
