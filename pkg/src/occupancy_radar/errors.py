"""Exception hierarchy for the occupancy radar pipeline."""


class OccupancyRadarError(Exception):
    """Base class for all pipeline errors."""


class ConfigError(OccupancyRadarError, ValueError):
    """Invalid radar or processing configuration."""


class SceneError(OccupancyRadarError, ValueError):
    """Scene description is invalid or places a scatterer outside the observable volume."""


class FFTSizeError(OccupancyRadarError, ValueError):
    pass


class InsufficientSnapshotsError(OccupancyRadarError, ValueError):
    pass


class NotPositiveDefiniteError(OccupancyRadarError, ArithmeticError):
    """Covariance failed Cholesky factorization; increase the diagonal loading."""


class DimensionError(OccupancyRadarError, ValueError):
    pass


class DegenerateLabelsError(OccupancyRadarError, ValueError):
    pass


class StratificationError(OccupancyRadarError, ValueError):
    pass


class DatasetError(OccupancyRadarError):
    pass
