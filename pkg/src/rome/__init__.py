"""Multi-resource HPC job scheduling: window selection, a multi-objective GA
over the window, and a preference-based decision maker, driven by a
trace-replay simulator."""

from rome.decision import PreferenceConfig, select_solution
from rome.metrics import build_report, compare_runs, time_weighted_utilization, wait_time_stats
from rome.moga import GaParams, ParetoFront, Selection, evolve, exact_front, hypervolume_2d
from rome.policies import Window, WindowConfig, order_fcfs, order_wfp, take_window
from rome.simcore import SchedulerConfig, run_simulation
from rome.trace import GenConfig, Job, SystemSpec, generate_synthetic, parse_trace

__version__ = "0.1.0"
