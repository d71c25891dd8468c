"""Analysis routes - contract analysis, posthumous scan and the fixture corpus."""

import logging
from typing import Any, Dict

from fastapi import APIRouter, HTTPException
from pydantic import ValidationError

from tracehound.bytecode import parse_hex
from tracehound.chainstate import ChainState, format_address, parse_address, parse_snapshot, scan_posthumous
from tracehound.config.settings import AnalysisConfig, ValidationConfig
from tracehound.errors import TraceHoundError
from tracehound.fixtures import FIXTURES
from tracehound.schemas.api import AnalyzeRequest, PosthumousRequest
from tracehound.services import analyze_contract, place_contract

logger = logging.getLogger(__name__)

router = APIRouter()


def _bad_request(exc: Exception) -> HTTPException:
    return HTTPException(status_code=400, detail=str(exc))


@router.post("/api/analyze")
def analyze(request: Dict[str, Any]):
    """
    Analyze one contract.

    Request body:
    {
        "bytecode": "0x6000...",
        "snapshot": {...},            (optional)
        "address": "0x...",           (optional)
        "categories": ["prodigal"],   (optional, default all three)
        "validate": true,             (optional)
        "alternate_snapshots": {"0x...": {...}}   (optional)
    }
    """
    try:
        req = AnalyzeRequest.model_validate(request)
        code = parse_hex(req.bytecode)
        start = parse_snapshot(req.snapshot) if req.snapshot is not None else ChainState()
        alternates = {parse_address(a): parse_snapshot(doc) for a, doc in req.alternate_snapshots.items()}
        cfg = AnalysisConfig.from_env(
            invocation_depth=req.depth,
            max_cfg_nodes=req.max_cfg_nodes,
            max_call_depth=req.max_call_depth,
            solver_timeout_s=req.solver_timeout_s,
            max_analysis_time_s=req.max_time_s,
            array_bound=req.array_bound,
        )
    except (ValidationError, TraceHoundError, ValueError) as exc:
        raise _bad_request(exc)
    if not code:
        raise HTTPException(status_code=400, detail="bytecode is empty")

    state, subject = place_contract(start, code, req.address or "api")
    report = analyze_contract(
        state,
        subject,
        req.categories,
        cfg,
        validate=req.validate_candidates,
        validation=ValidationConfig(replay_mode=req.replay_mode),
        sweep=req.depth_sweep,
        source="api",
        snapshot=start,
        alternates=alternates,
    )
    return report.model_dump(mode="json")


@router.post("/api/posthumous")
def posthumous(request: Dict[str, Any]):
    """Codeless accounts holding Ether in the posted snapshot."""
    try:
        req = PosthumousRequest.model_validate(request)
        state = parse_snapshot(req.snapshot)
    except (ValidationError, TraceHoundError, ValueError) as exc:
        raise _bad_request(exc)
    return {"addresses": [format_address(a) for a in scan_posthumous(state)]}


@router.get("/api/fixtures")
def list_fixtures():
    """Fixture names, summaries and expected verdicts."""
    return {
        "fixtures": [
            {
                "name": f.name,
                "summary": f.summary,
                "address": format_address(f.address),
                "expectations": [e.model_dump(mode="json", exclude_none=True) for e in f.expectations()],
            }
            for f in FIXTURES.values()
        ]
    }
