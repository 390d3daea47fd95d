"""Citrus disease classification from pretrained-CNN features.

Pipeline: :mod:`~citruspipe.dataset` (scan, decode, split) ->
:mod:`~citruspipe.featurex` (CNN or baseline features) ->
:mod:`~citruspipe.classify` (KNN, naive Bayes, random forest, logistic
regression) -> :mod:`~citruspipe.metrics`; :mod:`~citruspipe.runner` wires
the grid together and provides the CLI.
"""
from .dataset import DatasetIndex, SplitIndex, load_image, scan_dataset, stratified_split
from .featurex import ExtractorSpec, FeatureMatrix, baseline_extract, extract_features, preprocess_for_model
from .metrics import ConfusionMatrix, EvalReport, confusion, evaluate

__version__ = "0.1.0"
