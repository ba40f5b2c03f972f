"""Fluctuating two-ray (FTR) fading statistics, outage analysis and a
physical-model Monte Carlo simulator."""

from .ftr import (
    LiftedMetric,
    ftr_cdf,
    ftr_gmgf,
    ftr_igmgf,
    ftr_imgf_lower,
    ftr_imgf_upper,
    ftr_mgf,
    ftr_mgf_theta,
    ftr_moment,
    ftr_pdf,
    ftr_pdf_integer,
    lift_nakagami_metric,
    lift_rs_metric,
)
from .mc import McConfig, derive_amplitudes, empirical_cdf, mc_outage_a, mc_outage_b, sample_snr
from .models import FtrParams, MixtureTerm, NakagamiParams, RsParams
from .outage import ScenarioA, ScenarioB, compositions, interference_cdf, normalized_sinr, outage_a, outage_b
from .quad import QuadSpec

__version__ = "0.1.0"
