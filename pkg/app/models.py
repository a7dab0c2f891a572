"""
Module containing SQLAlchemy models for the bumping-route experiment service.
All models represent database tables and include basic documentation.
"""
import datetime
from sqlalchemy import Boolean, Column, DateTime, Integer, JSON, String
from .db import Base

# pylint: disable=too-few-public-methods
class ExperimentRun(Base):
    """
    Stored result of one experiment run.

    Attributes:
        id (int): Primary key.
        experiment (str): Experiment identifier.
        master_seed (int): Master seed of the run.
        created_at (datetime): Time the run was stored.
        passed (bool): Verdict of the built-in checks, NULL for exploratory runs.
        config (dict): Echoed configuration.
        summary (dict): Summary statistics.
    """
    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, index=True)
    experiment = Column(String, index=True, nullable=False)
    master_seed = Column(Integer, nullable=False)
    created_at = Column(DateTime, default=datetime.datetime.utcnow, nullable=False)
    passed = Column(Boolean, nullable=True)
    config = Column(JSON, nullable=False)
    summary = Column(JSON, nullable=False)
