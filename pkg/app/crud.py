from sqlalchemy.orm import Session
from . import models, schemas

# --- Experiment runs ---
def create_run(db: Session, report: schemas.ExperimentReport):
    """
    Store the result of an experiment run in the database.

    Args:
        db (Session): The database session used to interact with the database.
        report (schemas.ExperimentReport): The report to store; sample rows are not persisted.

    Returns:
        models.ExperimentRun: The newly created run object.
    """
    db_run = models.ExperimentRun(
        experiment=report.experiment,
        master_seed=report.config["master_seed"],
        passed=report.passed,
        config=report.config,
        summary={
            **report.summary,
            "checks": [check.model_dump() for check in report.checks],
        },
    )
    db.add(db_run)
    db.commit()
    db.refresh(db_run)
    return db_run

def get_run(db: Session, run_id: int):
    """
    Retrieve an experiment run from the database by its ID.

    Args:
        db (Session): The database session to use for the query.
        run_id (int): The ID of the run to retrieve.

    Returns:
        models.ExperimentRun: The run object if found, otherwise None.
    """
    return db.query(models.ExperimentRun).filter(models.ExperimentRun.id == run_id).first()

def get_runs(db: Session, skip: int = 0, limit: int = 100, experiment: str | None = None):
    """
    Retrieve stored runs, newest first.

    Args:
        db (Session): The database session.
        skip (int, optional): The number of records to skip. Defaults to 0.
        limit (int, optional): The maximum number of records to return. Defaults to 100.
        experiment (str, optional): Only runs of this experiment.

    Returns:
        list[models.ExperimentRun]: A list of run objects.
    """
    query = db.query(models.ExperimentRun)
    if experiment is not None:
        query = query.filter(models.ExperimentRun.experiment == experiment)
    return query.order_by(models.ExperimentRun.id.desc()).offset(skip).limit(limit).all()

def delete_run(db: Session, run_id: int):
    """
    Deletes an experiment run from the database.

    Args:
        db (Session): The database session.
        run_id (int): The ID of the run to be deleted.

    Returns:
        models.ExperimentRun: The deleted run object if found, otherwise None.
    """
    db_run = get_run(db, run_id)
    if db_run:
        db.delete(db_run)
        db.commit()
    return db_run
