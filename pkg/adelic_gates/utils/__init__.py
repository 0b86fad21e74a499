"""
Utility modules for the adelic_gates batch front-end
"""

from .job_utils import JobResult, run_jobs
from .report_utils import canonical_json, inputs_digest, render_table

__all__ = [
    'JobResult',
    'run_jobs',
    'canonical_json',
    'inputs_digest',
    'render_table',
]
