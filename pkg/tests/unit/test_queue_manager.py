"""
Unit tests for the simulation job queue
"""
import json
from datetime import datetime, timedelta

import pytest

import config
from modules import queue_manager
from modules.queue_manager import JobQueueManager

pytestmark = pytest.mark.unit

GB = 1024 ** 3


@pytest.fixture
def queue(tmp_path, monkeypatch):
    """Queue on a temporary file with plenty of free memory"""
    monkeypatch.setattr(queue_manager, "get_available_ram", lambda: 8 * GB)
    return JobQueueManager(queue_file=str(tmp_path / "queue.json"), start_cleanup=False)


def _request(preset="M1"):
    return {"preset": preset, "n": 1000, "reps": 10}


class TestQueue:
    """Tests for queueing and ordering"""

    def test_add_job(self, queue):
        """New jobs are queued with their request"""
        queue.add_job("job-1", _request(), estimated_ram=1024)
        job = queue.get_job("job-1")
        assert job["status"] == "queued"
        assert job["request"]["preset"] == "M1"
        assert queue.get_queue_count() == 1

    def test_positions_follow_arrival(self, queue):
        """Earlier jobs come first"""
        for i in range(3):
            queue.add_job(f"job-{i}", _request(), estimated_ram=1024)
        assert [queue.get_queue_position(f"job-{i}") for i in range(3)] == [1, 2, 3]
        assert queue.get_queue_position("missing") == 0

    def test_pop_marks_processing(self, queue):
        """pop_next_job starts the oldest job"""
        queue.add_job("job-1", _request(), estimated_ram=1024)
        queue.add_job("job-2", _request(), estimated_ram=1024)
        job = queue.pop_next_job()
        assert job["job_id"] == "job-1"
        assert queue.get_processing_count() == 1
        assert queue.get_queue_position("job-2") == 1
        assert queue.get_active_ram() == 1024

    def test_concurrency_limit(self, queue, monkeypatch):
        """No more than MAX_CONCURRENT_JOBS run at once"""
        monkeypatch.setattr(config, "MAX_CONCURRENT_JOBS", 1)
        queue.add_job("job-1", _request(), estimated_ram=1024)
        queue.add_job("job-2", _request(), estimated_ram=1024)
        assert queue.pop_next_job() is not None
        assert queue.pop_next_job() is None

    def test_memory_gate(self, queue, monkeypatch):
        """A job that would eat the RAM buffer waits"""
        monkeypatch.setattr(queue_manager, "get_available_ram", lambda: config.MIN_RAM_BUFFER + 10)
        queue.add_job("job-1", _request(), estimated_ram=1024)
        assert queue.pop_next_job() is None
        assert queue.get_job("job-1")["status"] == "queued"

    def test_empty_queue(self, queue):
        """Nothing to pop"""
        assert queue.pop_next_job() is None


class TestLifecycle:
    """Tests for finishing, failing and cleanup"""

    def test_mark_finished(self, queue):
        """Finished jobs record their result directory"""
        queue.add_job("job-1", _request(), estimated_ram=1024)
        queue.pop_next_job()
        queue.mark_finished("job-1", result_path="/tmp/out/job-1")
        job = queue.get_job("job-1")
        assert job["status"] == "finished"
        assert job["result_path"] == "/tmp/out/job-1"
        assert queue.get_average_processing_time() is not None

    def test_mark_error(self, queue):
        """Errors are stored on the job"""
        queue.add_job("job-1", _request(), estimated_ram=1024)
        queue.mark_error("job-1", "Replication 0 failed")
        assert queue.get_job("job-1")["error"] == "Replication 0 failed"

    def test_wait_estimate(self, queue):
        """Without history each position counts 120 seconds"""
        queue.add_job("job-1", _request(), estimated_ram=1024)
        queue.add_job("job-2", _request(), estimated_ram=1024)
        assert queue.estimate_wait_time("job-2") == 240

    def test_cleanup_expired(self, queue):
        """Old finished jobs are dropped, queued ones stay"""
        queue.add_job("job-1", _request(), estimated_ram=1024)
        queue.add_job("job-2", _request(), estimated_ram=1024)
        queue.mark_finished("job-1")
        queue.jobs["job-1"]["finished_at"] = (datetime.now() - timedelta(hours=48)).isoformat()
        assert queue.cleanup_expired_jobs(max_age_hours=24) == 1
        assert queue.get_job("job-1") is None
        assert queue.get_job("job-2") is not None

    def test_delete_job(self, queue):
        """delete_job reports whether the job existed"""
        queue.add_job("job-1", _request(), estimated_ram=1024)
        assert queue.delete_job("job-1") is True
        assert queue.delete_job("job-1") is False


class TestPersistence:
    """Tests for the JSON queue file"""

    def test_reload(self, tmp_path, queue):
        """A new manager sees the saved jobs"""
        queue.add_job("job-1", _request("M4"), estimated_ram=2048)
        reloaded = JobQueueManager(queue_file=queue.queue_file, start_cleanup=False)
        assert reloaded.get_job("job-1")["request"]["preset"] == "M4"

    def test_running_jobs_are_requeued(self, queue):
        """Jobs interrupted by a restart go back to the queue"""
        queue.add_job("job-1", _request(), estimated_ram=1024)
        queue.pop_next_job()
        reloaded = JobQueueManager(queue_file=queue.queue_file, start_cleanup=False)
        assert reloaded.get_job("job-1")["status"] == "queued"

    def test_corrupt_file(self, tmp_path):
        """Unreadable queue files start an empty queue"""
        path = tmp_path / "queue.json"
        path.write_text("{not json")
        assert JobQueueManager(queue_file=str(path), start_cleanup=False).jobs == {}

    def test_file_is_json(self, queue):
        """The queue file is plain JSON keyed by job id"""
        queue.add_job("job-1", _request(), estimated_ram=1024)
        with open(queue.queue_file) as f:
            assert list(json.load(f)) == ["job-1"]
