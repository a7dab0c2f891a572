"""
Module for experiment routes.
Lists the experiment catalogue and runs experiments synchronously, storing the result.
"""
from typing import List
from fastapi import APIRouter, Depends, HTTPException, status
from sqlalchemy.orm import Session

from app import crud, schemas
from app.core.config import BUMP_MAX_API_TRIALS, BUMP_THREADS
from app.core.exceptions import BumpError
from app.db import get_db
from app.services.experiments import EXPERIMENTS, run_experiment

router = APIRouter(prefix="/experiments", tags=["experiments"])

@router.get("/", response_model=List[schemas.ExperimentInfo])
def read_experiments():
    """
    Retrieve the catalogue of experiments.

    Returns:
        List[schemas.ExperimentInfo]: Name, sample columns and verdict mode of every experiment.
    """
    return [
        schemas.ExperimentInfo(
            name=e.name,
            columns=list(e.columns),
            exploratory=e.exploratory,
            description=e.description,
        )
        for e in EXPERIMENTS.values()
    ]

@router.post("/{name}", response_model=schemas.ExperimentRunRead,
             status_code=status.HTTP_201_CREATED)
def create_experiment_run(
    name: str,
    params: schemas.ExperimentParameters,
    db: Session = Depends(get_db)
):
    """
    Run an experiment and store its result.

    Args:
        name (str): Experiment identifier.
        params (schemas.ExperimentParameters): Simulation parameters.
        db (Session): The database session dependency.

    Returns:
        schemas.ExperimentRunRead: The stored run.

    Raises:
        HTTPException: 404 for an unknown experiment, 400 when the trial cap is exceeded
            or the parameters do not suit the experiment.
    """
    if name not in EXPERIMENTS:
        raise HTTPException(status_code=404, detail="Experiment not found")
    if params.trials > BUMP_MAX_API_TRIALS:
        raise HTTPException(
            status_code=400,
            detail=f"At most {BUMP_MAX_API_TRIALS} trials can be run through the API"
        )
    cfg = schemas.ExperimentConfig(experiment=name, threads=BUMP_THREADS, **params.model_dump())
    try:
        report = run_experiment(cfg)
    except BumpError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return crud.create_run(db, report)
