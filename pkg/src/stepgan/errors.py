"""Exception types shared across the toolkit."""


class StepganError(Exception):
    """Base class for all toolkit errors."""


# --- audio ingest / preparation ---

class UnreadableFile(StepganError):
    """File is missing, truncated, or not a parseable WAV."""


class UnsupportedEncoding(StepganError):
    """WAV uses a codec other than integer/float PCM."""


class InvalidRate(StepganError):
    """Requested sample rate is not a positive integer."""


class ZeroPeak(StepganError):
    """All-silent input cannot be peak-normalized."""


class NoOnset(StepganError):
    """Onset threshold never crossed."""


class UnknownClassDirectory(StepganError):
    """Dataset root contains a directory that is not a known surface class."""


class EmptyDataset(StepganError):
    """No usable audio found under the dataset root."""


# --- models ---

class InvalidFactor(StepganError):
    """Upsampling factor must be a positive integer."""


class ShapeMismatch(StepganError):
    """Tensor shapes are inconsistent with the model configuration."""


# --- training ---

class NonFiniteLoss(StepganError):
    """A loss became NaN/Inf; the run aborts with state at the last checkpoint."""


class NonFiniteGradient(StepganError):
    """Gradient penalty produced non-finite gradients."""


class StructureMismatch(StepganError):
    """Feature lists of real/fake critic outputs are not structurally identical."""


# --- metrics ---

class MetricInputError(StepganError):
    """Base class for invalid metric inputs."""


class ExtractorUnavailable(MetricInputError):
    """Requested embedding extractor has no registered backing model."""


class ExtractorMismatch(MetricInputError):
    """Embedding sets come from different extractors or dimensions."""


class DegenerateCovariance(MetricInputError):
    """Too few samples to fit a covariance (n < 2)."""


class InsufficientSamples(MetricInputError):
    """Estimator undefined for this few samples."""


class InvalidDistribution(MetricInputError):
    """Probability rows are not a valid distribution."""


class DegenerateInput(MetricInputError):
    """Input carries no usable variance."""


class InsufficientData(StepganError):
    """Not enough labeled data to train (e.g. fewer than 2 classes)."""


# --- stimuli ---

class IncompatibleCheckpoint(StepganError):
    """Checkpoint manifest does not match the requested model."""


class EmptyClipPool(StepganError):
    """Walk builder needs at least one clip to draw from."""


class MissingCondition(StepganError):
    """A required listening-test condition folder is absent."""


# --- ratings ---

class SchemaViolation(StepganError):
    """Ratings document does not follow the shared JSON schema."""


class NoDataRetained(StepganError):
    """All rating pages were excluded; nothing to summarize."""
