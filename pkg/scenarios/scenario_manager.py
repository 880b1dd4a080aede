import importlib
import inspect
import logging
import os

from config.detection_config import DetectionConfig
from core.errors import InvalidParameter
from core.kd_distribution import KDDistribution, ExtendedKD, MHQDistribution
from core.moments import DetectionReport
from core.work import WorkDistribution
from scenarios.scenario_result import ScenarioResult, encode_value

logger = logging.getLogger(__name__)


class ScenarioManager:
    SCENARIOS_DIR = os.path.dirname(os.path.abspath(__file__))
    SCENARIO_SUFFIX = "_scenario.py"

    def __init__(self):
        self.scenarios = {}  # {scenario_id: scenario_instance}
        self._load_scenarios()

    def _load_scenarios(self):
        """Import every *_scenario module and register the classes that declare a SCENARIO_ID."""
        for filename in sorted(os.listdir(self.SCENARIOS_DIR)):
            if not filename.endswith(self.SCENARIO_SUFFIX):
                continue
            module_name = filename[:-3]
            try:
                module = importlib.import_module(f"scenarios.{module_name}")
            except ImportError as e:
                logger.error(f"Error loading scenario module {module_name}: {e}")
                continue
            for name, cls in inspect.getmembers(module, inspect.isclass):
                if name.endswith("Scenario") and hasattr(cls, "SCENARIO_ID"):
                    self.scenarios[cls.SCENARIO_ID] = cls()
        logger.debug(f"Loaded scenarios {sorted(self.scenarios)}")

    def build(self, scenario_id: int, **parameters) -> ScenarioResult:
        if scenario_id not in self.scenarios:
            raise InvalidParameter(f"unknown scenario {scenario_id}; available: {sorted(self.scenarios)}")
        scenario = self.scenarios[scenario_id]
        known = {k: v for k, v in parameters.items() if k in scenario.DEFAULTS and v is not None}
        ignored = sorted(k for k, v in parameters.items() if k not in scenario.DEFAULTS and v is not None)
        if ignored:
            logger.warning(f"Scenario {scenario_id} takes {sorted(scenario.DEFAULTS)}; ignoring {ignored}")
        return scenario.build(**known)

    def run(self, scenario_id: int, config: DetectionConfig | None = None, **parameters) -> dict:
        """Build the scenario, recompute it through the production pipeline and compare."""
        config = config or DetectionConfig()
        result = self.build(scenario_id, **parameters)
        computed, rows = result.check(config)

        failed = [row["quantity"] for row in rows if not row["ok"]]
        if failed:
            logger.warning(f"{result.name}: mismatched quantities {failed}")
        else:
            logger.info(f"{result.name}: all {len(rows)} expected quantities reproduced")

        return {
            "scenario": result.name,
            "parameters": result.parameters,
            "checks": rows,
            "passed": not failed,
            "computed": {k: _encode_computed(v) for k, v in computed.items() if k != "detection"},
            "detection": computed["detection"].to_dict(),
            "detected": computed["detection"].certifies_nonpositivity,
        }


def _encode_computed(value):
    if isinstance(value, (KDDistribution, ExtendedKD, MHQDistribution, WorkDistribution, DetectionReport)):
        return value.to_dict()
    return encode_value(value)
