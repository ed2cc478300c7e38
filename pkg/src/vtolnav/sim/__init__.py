from .config import ScenarioConfig, disturbance_free_baseline, load_config, paper_baseline
from .runner import run
from .telemetry import RunLog, export_csv, import_csv

__all__ = [
    "RunLog", "ScenarioConfig", "disturbance_free_baseline", "export_csv",
    "import_csv", "load_config", "paper_baseline", "run",
]
