"""In-cabin occupancy detection with a low-resolution TDM-MIMO FMCW radar.

Pipeline: synthetic scene -> baseband cube -> range FFT -> stationary clutter
removal -> per-range-bin Capon spectrum -> range-azimuth map -> standardized
PCA -> one-vs-one kernel SVM.
"""
from .capon import (CovarianceMatrix, RangeAzimuthMap, capon_spectrum, default_angle_grid,
                    estimate_covariance, range_azimuth_map, steering)
from .classes import OccupancyClass
from .config import DerivedParams, RadarConfig, derive
from .dataset import DatasetManifest, generate, load_manifest, process_frame, split
from .features import PcaModel, fit_pca, flatten, transform
from .frontend import RangeProfileCube, range_fft, remove_clutter
from .pipeline import ClassifierBundle, evaluate_bundle, train
from .scene import CabinGeometry, RawDataCube, Scene, Target, scene_for_class, synthesize
from .svm import (ConfusionMatrix, SvmModel, evaluate, fit_ovo, grid_search_cv, predict,
                  train_binary)

__version__ = "0.1.0"
