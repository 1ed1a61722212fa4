"""Mutual-coupling-aware massive MIMO precoding and effective-capacity simulation."""

from coupledmimo.array import (
    ArrayGeometry,
    IncidentDirections,
    build_geometry,
    grid_for_count,
    sample_directions,
    steering_element,
    steering_matrix,
)
from coupledmimo.channel import ChannelRealization, equivalent_channel, sample_fading
from coupledmimo.coupling import (
    CouplingModel,
    DipoleParams,
    coupling_matrix,
    coupling_model,
    impedance_matrix,
    mutual_impedance,
    self_impedance,
)
from coupledmimo.errors import SingularSystemError, UnsupportedConfigurationError
from coupledmimo.metrics import (
    QosParams,
    effective_capacity,
    effective_capacity_upper_bound,
    max_rate_closed_form,
    shannon_rate,
)
from coupledmimo.precoding import (
    DetectionMatrix,
    Precoder,
    default_detection_matrix,
    optimal_precoder,
    power_allocation,
    rf_baseband_factorization,
    rf_chain_savings,
    zf_precoder,
)
from coupledmimo.specfun import cosine_integral, sine_integral

__version__ = "0.1.0"
