"""
Module for stored experiment runs.
Handles retrieval and deletion of runs.
"""
from typing import List, Optional
from fastapi import APIRouter, Depends, HTTPException, status
from sqlalchemy.orm import Session

from app import crud, schemas
from app.db import get_db

router = APIRouter(prefix="/runs", tags=["runs"])

@router.get("/", response_model=List[schemas.ExperimentRunRead])
def read_runs(
    skip: int = 0,
    limit: int = 100,
    experiment: Optional[str] = None,
    db: Session = Depends(get_db)
):
    """
    Retrieve stored runs, newest first.

    Args:
        skip (int, optional): The number of records to skip. Defaults to 0.
        limit (int, optional): The maximum number of records to return. Defaults to 100.
        experiment (str, optional): Only runs of this experiment.
        db (Session): The database session dependency.

    Returns:
        List[schemas.ExperimentRunRead]: Stored runs.
    """
    return crud.get_runs(db, skip, limit, experiment)

@router.get("/{run_id}", response_model=schemas.ExperimentRunRead)
def read_run(run_id: int, db: Session = Depends(get_db)):
    """
    Retrieve a run by its ID.

    Raises:
        HTTPException: If the run is not found, raises a 404 error.
    """
    run = crud.get_run(db, run_id)
    if not run:
        raise HTTPException(status_code=404, detail="Run not found")
    return run

@router.delete("/{run_id}", status_code=status.HTTP_204_NO_CONTENT)
def delete_run(run_id: int, db: Session = Depends(get_db)):
    """
    Deletes a run by its ID.

    Raises:
        HTTPException: If the run is not found (404 status code).
    """
    run = crud.delete_run(db, run_id)
    if not run:
        raise HTTPException(status_code=404, detail="Run not found")
