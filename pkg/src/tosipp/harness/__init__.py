from .bench import (CSV_COLUMNS, BenchmarkRecord, InternalConsistencyError, run_benchmark,
                    run_instance, summarize, write_csv)
from .scenario import (GenerationError, corridor_map, generate_scenario, generate_scenario_file,
                       random_instance, random_map, sample_agent)
from .svg import render_svg
from .validate import ValidationReport, Violation, validate_plan
