"""Robin, Dirichlet, Neumann and Wentzell Laplacian eigenvalues on simple domains."""

from .domain import (Ball, Disk, DomainError, Interval, MeshDomain, Rectangle, Union, make_ball,
                     make_dk, parse_domain, scale_domain, volume)
from .solve import UnsupportedProblem, dirichlet_spectrum, lambda_k, mu_k, robin_spectrum
from .spectrum import BoundaryParams, SolverError, Spectrum, UndersuppliedComponent, merge_spectra
from .wentzell import transfer_check, wentzell_eigs

__version__ = "0.1.0"
