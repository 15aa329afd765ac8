"""filtspec: filter-spectrum retrieval and between-class spectral variation
analysis for convolutional EEG classifiers."""

from .analysis import (
    ALPHA,
    BETA,
    DELTA,
    EEG_BANDS,
    GAMMA,
    LOWER_BAND,
    THETA,
    BandDefinition,
    ChannelCorrelation,
    CorrelationReport,
    band_mask,
    channel_correlations,
    pearson,
    rank_agreement,
    rescale_by_band_std,
)
from .errors import (
    ConsistencyError,
    DegenerateDataError,
    FormatError,
    GridError,
    InsufficientDataError,
    InvalidInputError,
    InvalidKindError,
    SegmentationError,
    ToolError,
)
from .filterspectrum import (
    FilterBank,
    FilterSpectrum,
    FrequencyGrid,
    GridEntry,
    ScaleSpec,
    UnificationMatrix,
    build_unification_matrix,
    retrieve_filter_spectrum,
    scale_frequencies,
    unique_frequencies,
)
from .formats import (
    ReportTables,
    fnv1a_64,
    load_accuracies,
    load_dataset,
    load_weights,
    save_dataset,
    save_weights,
    write_report,
)
from .spectral import (
    AMPLITUDE_DENSITY,
    POWER_DENSITY,
    PowerSpectrum,
    Signal,
    WelchConfig,
    dft_magnitudes,
    hann_window,
    resample_linear,
    spectral_density,
    welch_psd,
)
from .synth import (
    SynthConfig,
    counter_gaussians,
    counter_uniforms,
    eegnet_like_bank,
    gen_sinusoid_filterbank,
    gen_two_class_dataset,
    msacnn_like_bank,
)
from .variation import (
    BCVSpectrum,
    Channel,
    ClassSpectralStats,
    EpochDataset,
    between_class_variation,
    class_statistics,
    per_sample_density,
)

__version__ = "0.1.0"
