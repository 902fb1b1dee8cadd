"""
Run Logger

Collects timestamped entries for one run (a scenario, a synthesis search or a
CLI command). Library functions accept an optional logger and fall back to a
shared echoing one.
"""

import threading
import time
from datetime import datetime


class Logger:
    """Custom logger for tracking engine operations"""

    def __init__(self, echo=False):
        self.logs = []
        self.start_time = time.time()
        self.echo = echo
        self._lock = threading.Lock()

    def log(self, message, level="INFO"):
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        elapsed = time.time() - self.start_time
        log_entry = f"[{timestamp}] [{level}] [+{elapsed:.2f}s] {message}"
        with self._lock:
            self.logs.append(log_entry)
        if self.echo:
            print(log_entry)
        return log_entry

    def warn(self, message):
        return self.log(f"⚠️ {message}", level="WARNING")

    def warnings(self):
        return [entry for entry in self.logs if "] [WARNING] [" in entry]

    def get_logs(self):
        return "\n".join(self.logs)


_shared_logger = None


def get_logger():
    """Process-wide logger used when a caller did not pass its own."""
    global _shared_logger
    if _shared_logger is None:
        _shared_logger = Logger(echo=True)
    return _shared_logger
