"""convexport: extract first-layer temporal convolution weights from model
checkpoints and write them in the filtspec weights interchange format."""

from .export import (
    ExportError,
    ExportSpec,
    export_weights,
    load_checkpoint,
    resolve_layers,
)

__version__ = "0.1.0"
