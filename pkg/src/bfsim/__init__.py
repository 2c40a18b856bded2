"""bfsim: deterministic bearing-based multi-quadrotor formation tracking simulator.

A leader quadrotor tracks its global reference; followers regulate the
formation from inter-agent bearing and relative-velocity measurements
only, over a directed leader-follower sensing graph, with a reactive
barrier term for inter-agent collision avoidance and a high-gain inner
loop converting accelerations to thrust/angular-velocity commands.
"""
from .control import (CollisionParams, ControlGains, FollowerMeasurements,
                      FollowerReference, LeaderGains, VirtualAcceleration,
                      collision_term, estimate_udot, follower_control, gamma,
                      inner_loop, leader_control, outer_loop_follower)
from .dynamics import (ControlInput, QuadrotorParams, QuadrotorState,
                       reference_step, step)
from .errors import SimulationError
from .geometry import (attitude_from_thrust_dir, bearing, projector,
                       rot_y, rotation_from_rpy, skew, so3_exp)
from .graph import (SensingGraph, max_kp, renumber_leader_first,
                    validate_gains, validate_topology)
from .reporting import ValidationReport
from .sim_engine import (MetricsSummary, NoiseModel, SimConfig, SimRecord,
                         compute_metrics, extract_measurements, run)
from .trajectory import (BpeAgentResult, CircleParams, DesiredState, PEParams,
                         TableTrajectory, check_boundedness, circle_experiment,
                         finite_diff_derivatives, is_bpe, make_circle_provider,
                         pe_window_matrix, scenario1, scenario2, with_offset)

__version__ = "0.1.0"
