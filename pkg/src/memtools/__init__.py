"""Maximum-entropy-on-the-mean toolbox: rate functions and Bregman proximal
operators that drive first-order solvers for regularized linear inverse problems."""
from . import cramer, expfam, kernels, linops, models, oracle, prox, rootfind, solvers
from .cramer import cramer_domain_classify, cramer_grad, cramer_value
from .errors import (BracketFailure, ConfigError, DomainError, MaxIterations, MemError,
                     NoSignChange, NonConvergence, RootFailure, StepSizeError, Unsupported)
from .expfam import (NIG, Bernoulli, ContinuousUniform, DiscreteUniform, Gamma, Laplace,
                     Logistic, Multinomial, NegativeMultinomial, Normal, Poisson, Region)
from .kernels import BURG, ENERGY, ENTROPY, bregman_distance, get_kernel
from .models import GammaFidelity, NormalFidelity, PoissonFidelity, Problem, Regularizer
from .prox import ProxRequest, ProxResult, bregman_prox, dual_prox_theta, prox_residual
from .solvers import SolverOptions, SolverTrace, bpg, chambolle_pock_nig_tv, fista

__version__ = "0.1.0"
