"""
BlockMax Lab - FastAPI Application
Lab server for block-maxima copula experiments: queued simulations plus
on-demand estimation, asymptotic variances and second-order parameter estimates
"""
import logging
import os
import threading
import time
from datetime import datetime, timedelta
from typing import Dict, List, Optional

import numpy as np
import psutil
from fastapi import FastAPI, File, Form, HTTPException, Query, UploadFile
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse
from pydantic import BaseModel

import config
from modules.asymptotics import variance_curve
from modules.copula_models import GumbelHougaard
from modules.errors import BlockmaxError
from modules.estimators import EstimatorRequest, default_rho_config, evaluate, rho_pen_aggregated
from modules.queue_manager import get_queue_manager
from modules.series_gen import generate
from modules.simlab import (
    ExperimentSpec,
    emit,
    list_presets,
    preset,
    preset_model,
    replication_rng,
    run,
    select_estimators,
)
from modules.status_manager import get_status_manager
from modules.validator import check_experiment_admission, validate_data_csv
from utils.helpers import (
    cleanup_job_files,
    configure_logging,
    ensure_directories_exist,
    generate_job_id,
    is_allowed_file,
    job_output_dir,
    parse_axis,
    parse_range,
    product_grid,
)

configure_logging()
logger = logging.getLogger(__name__)

app = FastAPI(
    title="BlockMax Lab API",
    description="Extreme-value copula estimation from sliding and disjoint block maxima",
    version=config.VERSION,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=config.CORS_ORIGINS,
    allow_credentials=True,
    allow_methods=["GET", "POST", "DELETE", "OPTIONS"],
    allow_headers=["*"],
    max_age=3600,
)

status_manager = get_status_manager()
queue_manager = get_queue_manager()


class ExperimentRequest(BaseModel):
    preset: str = "M1"
    n: Optional[int] = None
    reps: Optional[int] = None
    full_scale: bool = False
    seed: Optional[int] = None
    workers: Optional[int] = None
    m_values: str = "1..20"
    estimators: Optional[List[str]] = None
    per_point: bool = False


class AdmissionResponse(BaseModel):
    allowed: bool
    estimated_ram: int
    available_ram: int
    message: str
    queue_count: int
    active_jobs: int


class SimulateResponse(BaseModel):
    job_id: str
    message: str


class StatusResponse(BaseModel):
    job_id: str
    status: str
    progress: int
    message: str
    result_path: Optional[str] = None
    error: Optional[str] = None
    queue_position: Optional[int] = None
    jobs_ahead: Optional[int] = None
    estimated_wait_seconds: Optional[int] = None
    estimated_start_time: Optional[str] = None


def build_spec(request: ExperimentRequest) -> ExperimentSpec:
    """
    Turn an API request into a validated experiment.

    Raises:
        BlockmaxError: unknown preset, estimator or invalid sizes
        ValueError: malformed block-size range
    """
    return preset(
        request.preset,
        n=request.n,
        reps=request.reps,
        full_scale=request.full_scale,
        master_seed=request.seed,
        m_values=parse_range(request.m_values),
        estimators=select_estimators(request.estimators),
    )


@app.on_event("startup")
async def startup_event():
    """Create storage directories and start the queue processor"""
    ensure_directories_exist()

    def queue_processor():
        logger.info("[QUEUE] Queue processor thread started")
        while True:
            try:
                next_job = queue_manager.pop_next_job()
                if next_job:
                    job_thread = threading.Thread(
                        target=process_queued_job,
                        args=(next_job,),
                        daemon=True,
                        name=f"Job-{next_job['job_id'][:8]}",
                    )
                    job_thread.start()
                    time.sleep(0.5)
                else:
                    time.sleep(1)
            except Exception as e:
                logger.exception("[QUEUE] Queue processor error: %s", e)
                time.sleep(5)

    thread = threading.Thread(target=queue_processor, daemon=True)
    thread.start()

    print("✅ BlockMax Lab started successfully")
    print(f"📁 Temp directory: {config.TEMP_DIR}")
    print(f"🧮 Presets: {len(list_presets())}, workers per job: {config.MAX_PARALLEL_WORKERS}")


@app.get("/")
async def root():
    return {"service": "BlockMax Lab", "status": "online", "version": config.VERSION}


@app.get("/health")
async def health_check():
    """Server health with queue counts and memory"""
    try:
        memory = psutil.virtual_memory()
        return {
            "status": "healthy",
            "server": "running",
            "active_jobs": status_manager.count_active_jobs(),
            "queue": {
                "queued_jobs": queue_manager.get_queue_count(),
                "processing_jobs": queue_manager.get_processing_count(),
            },
            "memory": {
                "available_mb": round(memory.available / (1024 * 1024), 2),
                "percent_used": memory.percent,
            },
        }
    except Exception as e:
        return {"status": "degraded", "server": "running", "error": str(e)}


@app.get("/ping")
async def ping():
    return {"pong": True, "timestamp": time.time()}


def process_queued_job(job: dict):
    """
    Run a queued simulation and write its artifacts.

    Args:
        job: Job dict from the queue
    """
    job_id = job["job_id"]
    logger.info("[QUEUE] Processing job %s", job_id)
    try:
        request = ExperimentRequest(**job["request"])
        spec = build_spec(request)
        status_manager.update_status(job_id, status="generating", message=f"Running {spec.name}")

        def status_callback(status, progress=None):
            status_manager.update_status(job_id, status=status, progress=progress)

        table = run(spec, workers=request.workers, status_callback=status_callback)
        out_dir = job_output_dir(job_id)
        emit(table, out_dir, per_point=request.per_point)

        message = f"{spec.name}: {spec.reps} replications in {table.elapsed_seconds:.1f}s"
        if table.flagged:
            message += f" ({len(table.flagged)} flagged cells)"
        status_manager.update_status(job_id, status="finished", message=message, result_path=out_dir)
        queue_manager.mark_finished(job_id, out_dir)

    except MemoryError as e:
        error_msg = f"Memory exhausted: {str(e)}. Reduce reps or n."
        status_manager.update_status(job_id, message="Server out of memory", error=error_msg)
        queue_manager.mark_error(job_id, error_msg)
        cleanup_job_files(job_id)

    except Exception as e:
        logger.error("[QUEUE] Job %s failed: %s", job_id, e)
        status_manager.update_status(job_id, message="Simulation failed", error=str(e))
        queue_manager.mark_error(job_id, str(e))
        cleanup_job_files(job_id)


@app.get("/api/presets")
async def get_presets():
    return {"presets": list_presets()}


@app.post("/api/check-experiment", response_model=AdmissionResponse)
async def check_experiment(request: ExperimentRequest):
    """Admission check: estimated memory of the experiment against what is free"""
    try:
        spec = build_spec(request)
    except (BlockmaxError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    result = check_experiment_admission(spec, request.workers)
    return AdmissionResponse(
        **result,
        queue_count=queue_manager.get_queue_count(),
        active_jobs=status_manager.count_active_jobs(),
    )


@app.post("/api/simulate", response_model=SimulateResponse)
async def simulate(request: ExperimentRequest):
    """Queue a simulation job"""
    try:
        spec = build_spec(request)
    except (BlockmaxError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))

    admission = check_experiment_admission(spec, request.workers)
    if not admission["allowed"]:
        raise HTTPException(status_code=503, detail={"error": "Server at capacity", "message": admission["message"]})

    job_id = generate_job_id()
    queue_manager.add_job(job_id, request.dict(), admission["estimated_ram"])
    status_manager.create_job(job_id, f"Queued {spec.name} ({spec.reps} replications)")
    logger.info("[QUEUE] Added job %s for %s", job_id, spec.name)
    return SimulateResponse(job_id=job_id, message="Experiment added to the processing queue.")


@app.get("/api/status/{job_id}", response_model=StatusResponse)
async def get_job_status(job_id: str):
    queue_job = queue_manager.get_job(job_id)
    if queue_job and queue_job["status"] == "queued":
        position = queue_manager.get_queue_position(job_id)
        wait_seconds = queue_manager.estimate_wait_time(job_id)
        return StatusResponse(
            job_id=job_id,
            status="queued",
            progress=0,
            message=f"Your job is queued. {position - 1} job(s) ahead.",
            queue_position=position,
            jobs_ahead=position - 1,
            estimated_wait_seconds=wait_seconds,
            estimated_start_time=(datetime.now() + timedelta(seconds=wait_seconds)).isoformat(),
        )

    status = status_manager.get_status(job_id)
    if status is None:
        raise HTTPException(status_code=404, detail="Job not found")
    data = status.to_dict()
    data.pop("created_at", None)
    data.pop("updated_at", None)
    return StatusResponse(**data, queue_position=0, jobs_ahead=0)


@app.get("/api/download/{job_id}")
async def download_summary(job_id: str, artifact: str = "summary"):
    """Download summary.csv (or points.csv / manifest.json) of a finished job"""
    files = {"summary": ("summary.csv", "text/csv"), "points": ("points.csv", "text/csv"), "manifest": ("manifest.json", "application/json")}
    if artifact not in files:
        raise HTTPException(status_code=400, detail=f"Unknown artifact '{artifact}'")
    status = status_manager.get_status(job_id)
    if status is None:
        raise HTTPException(status_code=404, detail="Job not found")
    if status.status != "finished":
        raise HTTPException(status_code=400, detail=f"Job not ready. Current status: {status.status}")
    filename, media_type = files[artifact]
    path = os.path.join(status.result_path or "", filename)
    if not os.path.exists(path):
        raise HTTPException(status_code=404, detail="Result file not found. May have been deleted.")
    return FileResponse(path=path, media_type=media_type, filename=f"{job_id}_{filename}")


@app.delete("/api/cleanup/{job_id}")
async def cleanup_job(job_id: str):
    exists_in_status = status_manager.job_exists(job_id)
    exists_in_queue = queue_manager.get_job(job_id) is not None
    if not exists_in_status and not exists_in_queue:
        raise HTTPException(status_code=404, detail="Job not found")

    cleanup_job_files(job_id)
    if exists_in_status:
        status_manager.delete_job(job_id)
    if exists_in_queue:
        queue_manager.delete_job(job_id)
    return {"message": f"Job {job_id} cleaned up successfully"}


@app.post("/api/estimate")
async def estimate(
    file: UploadFile = File(...),
    estimator: str = Form("sliding"),
    m: int = Form(...),
    m_prime: int = Form(1),
    blocks: Optional[str] = Form(None),
    weights: str = Form("harmonic"),
    rho: str = Form("pen_agg"),
    grid: str = Form("0.1:0.9:0.1"),
):
    """
    Evaluate one estimator on an uploaded data CSV.

    Returns:
        Grid points and estimator values
    """
    if not is_allowed_file(file.filename or ""):
        raise HTTPException(status_code=400, detail="Invalid file type. Only CSV files are allowed.")

    upload_id = generate_job_id()
    upload_path = os.path.join(config.UPLOAD_DIR, f"{upload_id}.csv")
    os.makedirs(config.UPLOAD_DIR, exist_ok=True)
    content = await file.read()
    if len(content) > config.MAX_UPLOAD_BYTES:
        raise HTTPException(status_code=413, detail="Data file too large")
    with open(upload_path, "wb") as buffer:
        buffer.write(content)
    del content
    logger.info("[UPLOAD] %s saved as %s", file.filename, upload_path)

    try:
        validation = validate_data_csv(upload_path)
        if not validation.is_valid:
            raise HTTPException(status_code=400, detail=validation.message)
        data = validation.data["matrix"]
        request = EstimatorRequest(
            name=estimator,
            m=m,
            m_prime=m_prime,
            blocks=tuple(parse_range(blocks)) if blocks else (),
            weights=weights,
            rho=rho,
        )
        points = product_grid(parse_axis(grid), data.d)
        result = evaluate(request, data, points, rho_config=default_rho_config(data.d))
    except (BlockmaxError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    finally:
        if os.path.exists(upload_path):
            os.remove(upload_path)

    return {
        "estimator": result.name,
        "n": data.n,
        "d": data.d,
        "message": validation.message,
        "grid": result.grid.tolist(),
        "values": result.values.tolist(),
        "meta": result.meta,
    }


@app.get("/api/variance")
async def variance(
    beta: float = Query(1.0),
    d: int = Query(2),
    grid: str = Query("0.1:0.9:0.1"),
    a: str = Query("1"),
):
    """Asymptotic sliding and disjoint variances along the diagonal for a Gumbel-Hougaard C_inf"""
    try:
        copula = GumbelHougaard(beta=beta, d=d)
        frame = variance_curve(copula, parse_axis(grid), parse_axis(a))
    except (BlockmaxError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    rows = frame.replace({np.nan: None}).to_dict(orient="records")
    return {"beta": beta, "d": d, "rows": rows}


@app.get("/api/rho")
async def rho(
    preset_name: str = Query("M1", alias="preset"),
    n: int = Query(4000),
    seed: int = Query(config.MASTER_SEED),
):
    """Penalised aggregated rho estimate on one series generated from a preset"""
    try:
        model = preset_model(preset_name)
        data = generate(model, n, replication_rng(seed, 0))
        estimate_ = rho_pen_aggregated(data, default_rho_config(model.d))
    except (BlockmaxError, ValueError) as e:
        raise HTTPException(status_code=400, detail=str(e))
    result: Dict[str, object] = {
        "preset": preset_name,
        "n": n,
        "seed": seed,
        "rho_hat": estimate_.value,
        "skipped_points": estimate_.skipped,
        "rho_true": None,
    }
    if model.p == 0:
        try:
            result["rho_true"] = model.base.second_order().rho_phi
        except BlockmaxError:
            pass
    return result


if __name__ == "__main__":
    import uvicorn

    uvicorn.run("app:app", host=config.HOST, port=config.PORT, reload=config.DEBUG)
