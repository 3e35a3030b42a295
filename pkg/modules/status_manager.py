"""
Status Manager Module - Tracks progress of simulation jobs
"""
import logging
import threading
from dataclasses import asdict, dataclass
from datetime import datetime, timedelta
from typing import Dict, Optional

import config

logger = logging.getLogger(__name__)

ACTIVE_STATUSES = ("generating", "estimating", "summarizing")

# progress a job jumps to when it enters a status
STATUS_PROGRESS = {
    "queued": 0,
    "generating": 1,
    "estimating": 5,
    "summarizing": 92,
    "finished": 100,
    "error": 0,
}


@dataclass
class JobStatus:
    """Status information for a simulation job"""
    job_id: str
    status: str  # queued, generating, estimating, summarizing, finished, error
    progress: int  # 0-100
    message: str
    result_path: Optional[str] = None
    error: Optional[str] = None
    created_at: datetime = None
    updated_at: datetime = None

    def __post_init__(self):
        if self.created_at is None:
            self.created_at = datetime.now()
        if self.updated_at is None:
            self.updated_at = datetime.now()

    def to_dict(self) -> dict:
        """Convert to dictionary for API responses"""
        data = asdict(self)
        data["created_at"] = self.created_at.isoformat() if self.created_at else None
        data["updated_at"] = self.updated_at.isoformat() if self.updated_at else None
        return data


class StatusManager:
    """Thread-safe manager for job statuses"""

    def __init__(self):
        self._statuses: Dict[str, JobStatus] = {}
        self._lock = threading.Lock()

    def create_job(self, job_id: str, initial_message: str = "Job queued") -> JobStatus:
        """
        Register a simulation job in the queued state.

        Args:
            job_id: Unique job identifier
            initial_message: First status message shown to pollers

        Returns:
            The new JobStatus
        """
        with self._lock:
            status = JobStatus(job_id=job_id, status="queued", progress=0, message=initial_message)
            self._statuses[job_id] = status
            return status

    def update_status(
        self,
        job_id: str,
        status: str = None,
        progress: int = None,
        message: str = None,
        result_path: str = None,
        error: str = None
    ) -> Optional[JobStatus]:
        """
        Update job status.

        Args:
            job_id: Job identifier
            status: New status value
            progress: Progress percentage (0-100), overrides the status default
            message: Status message
            result_path: Path to the result directory
            error: Error message; forces status 'error'

        Returns:
            Updated JobStatus object or None if job not found
        """
        with self._lock:
            job = self._statuses.get(job_id)
            if job is None:
                return None

            if status is not None:
                if status not in STATUS_PROGRESS:
                    raise ValueError(f"Unknown job status '{status}'")
                if status != job.status:
                    logger.debug("[STATUS] %s: %s -> %s", job_id, job.status, status)
                job.status = status
                job.progress = STATUS_PROGRESS[status]

            if progress is not None:
                job.progress = max(0, min(100, progress))

            if message is not None:
                job.message = message

            if result_path is not None:
                job.result_path = result_path

            if error is not None:
                job.error = error
                job.status = "error"

            job.updated_at = datetime.now()
            return job

    def get_status(self, job_id: str) -> Optional[JobStatus]:
        """
        Look up the current status of a job.

        Args:
            job_id: Job identifier

        Returns:
            JobStatus, or None for an unknown id
        """
        with self._lock:
            return self._statuses.get(job_id)

    def job_exists(self, job_id: str) -> bool:
        """True if the job is tracked"""
        with self._lock:
            return job_id in self._statuses

    def delete_job(self, job_id: str) -> bool:
        """
        Stop tracking a job.

        Args:
            job_id: Job identifier

        Returns:
            True if the job was removed, False if it was unknown
        """
        with self._lock:
            return self._statuses.pop(job_id, None) is not None

    def cleanup_old_jobs(self, max_age_hours: int = None) -> int:
        """
        Remove jobs older than specified hours.

        Args:
            max_age_hours: Retention window in hours (defaults to config.JOB_RETENTION_HOURS)

        Returns:
            Number of jobs cleaned up
        """
        if max_age_hours is None:
            max_age_hours = config.JOB_RETENTION_HOURS
        cutoff_time = datetime.now() - timedelta(hours=max_age_hours)

        with self._lock:
            stale = [job_id for job_id, status in self._statuses.items() if status.created_at < cutoff_time]
            for job_id in stale:
                del self._statuses[job_id]
            return len(stale)

    def get_all_jobs(self) -> Dict[str, JobStatus]:
        """
        Snapshot of every tracked job, for the admin endpoints.

        Returns:
            Copy of the job id -> JobStatus mapping
        """
        with self._lock:
            return self._statuses.copy()

    def count_active_jobs(self) -> int:
        """
        Count jobs in one of the ACTIVE_STATUSES.

        Returns:
            Number of active jobs
        """
        with self._lock:
            return sum(1 for status in self._statuses.values() if status.status in ACTIVE_STATUSES)


# Global instance
_status_manager = StatusManager()


def get_status_manager() -> StatusManager:
    """Get the global status manager instance"""
    return _status_manager
