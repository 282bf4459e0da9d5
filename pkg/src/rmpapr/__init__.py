"""Reed-Muller coded, Walsh-Hadamard spread MC-CDMA with bounded PAPR."""
__version__ = "0.1.0"

from .boolfn import BooleanFunction, Codeword, affine, codeword_of, compose_halves, degree, eval_boolean
from .estimators import MCCDMAModulator, ReedMullerEncoder
from .rmcodes import (
    CodeSpec,
    GeneratorMatrix,
    bpsk,
    coset_soft_decode,
    encode,
    encode_many,
    enumerate_code,
    enumerate_golay,
    fht_decode_rm1,
    generator_b2,
    generator_b3,
    generator_recursive,
    generator_rm1,
    golay_boolean,
)
from .simkit import (
    BoundReport,
    CcdfCurve,
    awgn_roundtrip,
    ccdf_estimate,
    certify_bound,
    golay_max_table,
    lambda_at,
    user_sweep,
)
from .transform import fwht, hadamard_entry, hadamard_matrix, tensor_profile
from .waveform import (
    PaprResult,
    SystemConfig,
    assemble_spectrum,
    deinterleave,
    despread,
    eval_S,
    papr,
    spread,
    synthesize,
    transmit,
)
