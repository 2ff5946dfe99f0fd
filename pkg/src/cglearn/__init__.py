"""Structure learning for LWF chain graphs via Markov blanket discovery."""

__version__ = "0.1.0"

from .blanket import MbAlgorithm, MbResult, learn_mb
from .ci import CIResult, CISource, Dataset, FisherZ, GraphOracle
from .errors import (
    CGLearnError,
    ConfigError,
    DegenerateDataError,
    InsufficientSamplesError,
    InvalidGraphError,
    InvalidQueryError,
)
from .evaluate import EvalReport, GridSpec, evaluate, run_grid, shd, skeleton_metrics
from .graph import ChainGraph, PartiallyDirectedGraph, UndirectedGraph, c_separated, pattern_of
from .learner import LearnTrace, SepsetTable, mblwf, min_separator
from .simulate import GenConfig, SampleConfig, random_cg, sample_gaussian
