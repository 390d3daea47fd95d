from .cache import features_from_bytes, features_to_bytes, load_features, save_features
from .config import ClassifierSpec, ExperimentConfig, config_from_dict, load_config
from .contact import choose_samples, export_contact_sheet
from .experiment import CellError, features_for, run_experiment
from .report import (
    ResultRecord,
    metric_chart_svg,
    read_results_csv,
    render_metric_chart,
    results_csv_text,
    write_results_csv,
)
