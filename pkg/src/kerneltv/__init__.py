"""Total-variation denoising and enhancement in kernel function spaces."""
from .coupling import ColorChannel, GrayConstant, kernel_field, make_coupled
from .gtv import SolverConfig, denoise, denoise_color, denoise_gray
from .image import Image, channel_view, from_u8, to_u8
from .kernels import Gaussian, Polynomial, evaluate, metric_inner
from .metrics import area_ratio, psnr, select_kernel_param, surface_area
from .nltv import NlConfig, build_graph, denoise_nltv
from .noise import NoiseSpec, add_multiplicative_gaussian

__version__ = "0.1.0"
