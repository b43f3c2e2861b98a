from gchains.models.links import LinearPsi, Logit, StepPsi, TabulatedLink, TabulatedPsi
from gchains.models.autoregressive import ARKernel, ARParams, PowerTail, ar_eval, ar_eval_interval, ar_l2_bounds
from gchains.models.bkf import BKFKernel, BKFParams, GeometricGenerator, bkf_eval, bkf_l2_bounds
from gchains.models.renewal import RenewalKernel, RenewalParams, renewal_eval
from gchains.models.finite_memory import FiniteMemoryKernel, freeze
from gchains.models.custom import CustomKernel
from gchains.models.schema import dump_model_spec, kernel_from_spec, load_model_spec
