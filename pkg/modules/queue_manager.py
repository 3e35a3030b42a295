"""
Job Queue Manager - Queues simulation jobs with JSON persistence
"""
import json
import logging
import os
import threading
import time
from datetime import datetime, timedelta
from typing import Dict, Optional

import psutil

import config

logger = logging.getLogger(__name__)


def get_available_ram() -> int:
    return int(psutil.virtual_memory().available)


class JobQueueManager:
    """
    Simulation job queue persisted to a JSON file.

    Survives server restarts; jobs that were running when the server stopped
    are re-queued on load.
    """

    def __init__(self, queue_file: str = None, start_cleanup: bool = True):
        self.queue_file = queue_file or config.QUEUE_FILE
        self.jobs: Dict[str, dict] = {}
        self.lock = threading.RLock()
        self._load_from_disk()
        if start_cleanup:
            self._start_cleanup_thread()

    def _load_from_disk(self):
        try:
            if os.path.exists(self.queue_file):
                with open(self.queue_file, "r") as f:
                    self.jobs = json.load(f)
                for job in self.jobs.values():
                    if job.get("status") == "processing":
                        job["status"] = "queued"
                        job["started_at"] = None
                logger.info("[QUEUE] Loaded %d jobs from %s", len(self.jobs), self.queue_file)
            else:
                self.jobs = {}
        except (OSError, ValueError) as e:
            logger.warning("[QUEUE] Error loading queue file: %s. Starting fresh.", e)
            self.jobs = {}

    def _save_to_disk(self):
        try:
            directory = os.path.dirname(self.queue_file)
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(self.queue_file, "w") as f:
                json.dump(self.jobs, f, indent=2, default=str)
        except OSError as e:
            logger.error("[QUEUE] Error saving queue: %s", e)

    def _start_cleanup_thread(self):
        def cleanup_loop():
            while True:
                try:
                    self.cleanup_expired_jobs()
                except Exception as e:
                    logger.error("[QUEUE] Cleanup error: %s", e)
                time.sleep(60)

        thread = threading.Thread(target=cleanup_loop, daemon=True)
        thread.start()

    def add_job(self, job_id: str, request: dict, estimated_ram: int):
        """
        Add a simulation job to the queue.

        Args:
            job_id: Job identifier
            request: Experiment request (preset, n, reps, seed, workers, ...)
            estimated_ram: Estimated peak memory in bytes
        """
        with self.lock:
            self.jobs[job_id] = {
                "job_id": job_id,
                "request": request,
                "estimated_ram": int(estimated_ram),
                "status": "queued",
                "queued_at": datetime.now().isoformat(),
                "started_at": None,
                "finished_at": None,
                "error": None,
            }
            self._save_to_disk()

    def get_job(self, job_id: str) -> Optional[dict]:
        with self.lock:
            return self.jobs.get(job_id)

    def get_queue_count(self) -> int:
        with self.lock:
            return sum(1 for j in self.jobs.values() if j.get("status") == "queued")

    def get_processing_count(self) -> int:
        with self.lock:
            return sum(1 for j in self.jobs.values() if j.get("status") == "processing")

    def get_queue_position(self, job_id: str) -> int:
        """Position in queue (1-indexed), 0 when the job is not queued"""
        with self.lock:
            job = self.jobs.get(job_id)
            if not job or job.get("status") != "queued":
                return 0
            queued = sorted(
                (j for j in self.jobs.values() if j.get("status") == "queued"),
                key=lambda x: x.get("queued_at", ""),
            )
            for i, j in enumerate(queued):
                if j["job_id"] == job_id:
                    return i + 1
            return 0

    def get_average_processing_time(self) -> Optional[int]:
        """Average seconds over the last ten finished jobs"""
        with self.lock:
            durations = []
            for job in self.jobs.values():
                if job.get("status") != "finished" or not job.get("started_at") or not job.get("finished_at"):
                    continue
                try:
                    started = datetime.fromisoformat(job["started_at"])
                    finished = datetime.fromisoformat(job["finished_at"])
                except ValueError:
                    continue
                durations.append((finished - started).total_seconds())
            if not durations:
                return None
            recent = durations[-10:]
            return int(sum(recent) / len(recent))

    def estimate_wait_time(self, job_id: str) -> int:
        position = self.get_queue_position(job_id)
        if position == 0:
            return 0
        return position * (self.get_average_processing_time() or 120)

    def get_active_ram(self) -> int:
        with self.lock:
            return sum(j.get("estimated_ram", 0) for j in self.jobs.values() if j.get("status") == "processing")

    def pop_next_job(self) -> Optional[dict]:
        """
        Start the oldest queued job if memory and the concurrency limit allow.

        Returns:
            Job dict marked 'processing', or None
        """
        with self.lock:
            if self.get_processing_count() >= config.MAX_CONCURRENT_JOBS:
                return None
            queued = sorted(
                (j for j in self.jobs.values() if j.get("status") == "queued"),
                key=lambda x: x.get("queued_at", ""),
            )
            if not queued:
                return None
            next_job = queued[0]

            ram_after = get_available_ram() - next_job.get("estimated_ram", 0)
            if ram_after < config.MIN_RAM_BUFFER:
                logger.info(
                    "[QUEUE] Cannot start job %s: would leave only %.1fMB RAM (need %.0fMB buffer)",
                    next_job["job_id"], ram_after / (1024 * 1024), config.MIN_RAM_BUFFER / (1024 * 1024),
                )
                return None

            logger.info(
                "[QUEUE] Starting job %s (estimated %.1fMB RAM, %d active)",
                next_job["job_id"], next_job.get("estimated_ram", 0) / (1024 * 1024), self.get_processing_count(),
            )
            next_job["status"] = "processing"
            next_job["started_at"] = datetime.now().isoformat()
            self._save_to_disk()
            return next_job

    def mark_finished(self, job_id: str, result_path: str = None):
        with self.lock:
            if job_id in self.jobs:
                self.jobs[job_id]["status"] = "finished"
                self.jobs[job_id]["finished_at"] = datetime.now().isoformat()
                self.jobs[job_id]["result_path"] = result_path
                self._save_to_disk()

    def mark_error(self, job_id: str, error: str):
        with self.lock:
            if job_id in self.jobs:
                self.jobs[job_id]["status"] = "error"
                self.jobs[job_id]["error"] = error
                self.jobs[job_id]["finished_at"] = datetime.now().isoformat()
                self._save_to_disk()

    def cleanup_expired_jobs(self, max_age_hours: int = None) -> int:
        """Drop finished and failed jobs past the retention window, with their files"""
        if max_age_hours is None:
            max_age_hours = config.JOB_RETENTION_HOURS
        cutoff = datetime.now() - timedelta(hours=max_age_hours)
        with self.lock:
            expired = []
            for job_id, job in self.jobs.items():
                if job.get("status") not in ("finished", "error") or not job.get("finished_at"):
                    continue
                try:
                    if datetime.fromisoformat(job["finished_at"]) < cutoff:
                        expired.append(job_id)
                except ValueError:
                    expired.append(job_id)
            for job_id in expired:
                self._cleanup_job_files(job_id)
                del self.jobs[job_id]
            if expired:
                self._save_to_disk()
                logger.info("[QUEUE] Cleaned up %d expired jobs", len(expired))
            return len(expired)

    def _cleanup_job_files(self, job_id: str):
        from utils.helpers import cleanup_job_files
        cleanup_job_files(job_id)

    def delete_job(self, job_id: str) -> bool:
        with self.lock:
            if job_id not in self.jobs:
                return False
            self._cleanup_job_files(job_id)
            del self.jobs[job_id]
            self._save_to_disk()
            return True


# Global singleton
_queue_manager = None


def get_queue_manager() -> JobQueueManager:
    """Get global queue manager instance"""
    global _queue_manager
    if _queue_manager is None:
        _queue_manager = JobQueueManager()
    return _queue_manager
