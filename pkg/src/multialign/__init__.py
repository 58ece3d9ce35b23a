"""Word-alignment improvement from multiparallel alignment graphs.

Pairwise alignments of one verse across many editions form a graph; missing
edges between a target pair of editions are predicted with Adamic-Adar
link prediction or masked NMF, extracted by mutual argmax and added to a
baseline alignment.
"""

__version__ = "0.1.0"

from .align_graph import RatingScale, SentenceGraph, build_graph, degree, target_submatrix
from .corpus_io import (
    AlignmentSet,
    EditionId,
    GoldStandard,
    MultiSentence,
    TokenRef,
    load_alignments,
    load_corpus,
    load_gold,
    write_alignments,
)
from .evaluation import EvalResult, evaluate, language_ablation, stratify
from .extraction import ExtractionConfig, PipelineSpec, argmax_extract, merge, run_pipeline
from .kernels import BACKEND
from .link_prediction import ScoreMatrix, adamic_adar, weighted_adamic_adar
from .nmf import FactorPair, NmfConfig, factorize, predict
from .synth import SynthConfig, generate, score_recovery
