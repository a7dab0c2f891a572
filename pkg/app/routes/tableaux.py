"""
Module for tableau routes.
Exposes the RSK correspondence and bumping routes of probes.
"""
from fastapi import APIRouter, HTTPException

from app import schemas
from app.core.exceptions import BumpError
from app.services.bumping import row_route
from app.services.tableau_core import Entry, InsertionTableau, rsk

router = APIRouter(prefix="/tableaux", tags=["tableaux"])

@router.post("/rsk", response_model=schemas.RskResponse)
def compute_rsk(request: schemas.RskRequest):
    """
    Compute the insertion and recording tableaux of a sequence.

    Args:
        request (schemas.RskRequest): The sequence.

    Returns:
        schemas.RskResponse: P, Q and their common shape.

    Raises:
        HTTPException: 400 if the sequence has repeated values.
    """
    if len(set(request.word)) != len(request.word):
        raise HTTPException(status_code=400, detail="Sequence entries must be pairwise distinct")
    p, q = rsk(request.word)
    return schemas.RskResponse(
        insertion=p.to_lists(),
        recording=q.rows,
        shape=list(p.shape.rows),
    )

@router.post("/bumping-route", response_model=schemas.BumpingRouteResponse)
def compute_bumping_route(request: schemas.BumpingRouteRequest):
    """
    Insert the probe m+½ into a tableau and return its bumping route.

    Args:
        request (schemas.BumpingRouteRequest): Tableau rows and the probe level.

    Returns:
        schemas.BumpingRouteResponse: Route boxes and the tableau after the insertion.

    Raises:
        HTTPException: 400 if the rows do not form a tableau.
    """
    try:
        tableau = InsertionTableau([[Entry.finite(v) for v in row] for row in request.rows])
        route = row_route(tableau, request.m)
        after = tableau.copy()
        after.insert(Entry.probe(request.m))
    except BumpError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return schemas.BumpingRouteResponse(
        route=[[x, y] for y, x in sorted(route.items())],
        tableau=after.to_lists(),
    )
