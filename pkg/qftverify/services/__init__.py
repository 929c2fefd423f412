from .closeness import closeness_report
from .noise import build_channel, make_c_channel, make_p_channel
from .reports import emit_report, load_report
from .suites import run_suite
from .verify import ShotPlan, decide_s3, run_protocol
