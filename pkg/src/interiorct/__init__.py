"""Fan-beam interior tomography toolkit.

Simulation, filtered backprojection, differentiated backprojection with
finite-Hilbert chord inversion, a TV-POCS interior baseline, metrics,
and dataset export for learning experiments.
"""

from .errors import DivergenceError, IllPosedError, ValidationError
from .geometry import (ChordSpec, Geometry, RoiSpec, chord_grid, chord_tau,
                       make_geometry, roi_radius)
from .phantom import (Ellipse, Phantom, analytic_parallel_sinogram,
                      analytic_sinogram, piecewise_constant_phantom,
                      random_phantom, rasterize, reference_phantom,
                      soft_ellipse, uniform_disk_phantom)
from .projector import (Image, Sinogram, back_project, disk_mask,
                        forward_project, read_image, read_sinogram,
                        subsample_views, truncate, write_image,
                        write_sinogram)
from .fbp import (FilterSpec, cupping_image, export_png, fbp_reconstruct,
                  parker_weights, ramp_filter, ramp_kernel)
from .hilbert import ChordSignal, cauchy_pv, finite_hilbert, hilbert_1d
from .dbp import (DbpImage, ParallelSinogram, bpf_reconstruct,
                  chord_integrals_from_sinogram, dbp_image,
                  rebin_to_parallel, view_derivative)
from .inversion import (InversionInputs, chord_inversion, dbp_null_component,
                        finite_hilbert_inverse, null_space_signal,
                        offset_epsilon, weight_w)
from .tv import TvParams, TvResult, tv_pocs_reconstruct, tv_value
from .metrics import MetricReport, evaluate, nmse, psnr, ssim_global
from .dataset import (DatasetManifest, DatasetPair, augment, build_pairs,
                      read_dataset, write_dataset)

__version__ = "1.0.0"
