"""Time-optimal any-angle safe-interval path planning among moving disks."""
from .geometry import TimeInterval, los, unsafe_departure_intervals, vertex_unsafe_intervals
from .heuristics import build_heuristic, pairwise_h
from .intervals import SafeIntervalTable, build_safe_intervals
from .planners import (PLANNERS, PlannerResult, PlannerStats, plan_aa_sipp, plan_ito, plan_nto,
                       plan_sipp, validate_transition)
from .world import GridMap, MotionPlan, ProblemInstance, TimedAction

__version__ = "0.1.0"
