"""OFDM clipping-and-filtering PAPR reduction simulator."""
from .config import SimulationConfig, load_config
from .dsp import BasebandBlock, PassbandBlock, SpectrumBlock
from .firdesign import FilterSpec, FirFilter, FrequencyMask, remez_design
from .modem import ModulationScheme
from .montecarlo import BerCurve, CcdfCurve, estimate_ber, estimate_ccdf, papr_at_ccdf
from .peak import ChainOutput, ClipConfig, Scheme, papr_db, run_chain

__all__ = [
    "BasebandBlock", "BerCurve", "CcdfCurve", "ChainOutput", "ClipConfig", "FilterSpec",
    "FirFilter", "FrequencyMask", "ModulationScheme", "PassbandBlock", "Scheme",
    "SimulationConfig", "SpectrumBlock", "estimate_ber", "estimate_ccdf", "load_config",
    "papr_at_ccdf", "papr_db", "remez_design", "run_chain",
]
