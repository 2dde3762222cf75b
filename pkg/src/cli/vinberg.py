"""Vinberg, reflectivity and W^(−2) walk commands."""

from functools import partial
from pathlib import Path
from typing import Any

import click

from src.cli.common import (
    EXIT_ERROR,
    budget_priority_option,
    budget_walls_option,
    command_scope,
    jobs_option,
    lattice_option,
    lattices_option,
    make_budget,
    out_option,
    parse_int_vector,
    parse_rational_vector,
    read_blobs,
    read_lattice_file,
    run_batch,
)
from src.config import get_settings
from src.exceptions import LatticeToolError
from src.schemas.common import BatchItem, BatchReport, ErrorCode, format_rational, parse_rational
from src.schemas.mukai import GeneratingSet
from src.schemas.vinberg import Budget, FundamentalPolyhedron, ReflectivityVerdict, WalkResult
from src.services.certificate_service import get_certificate_service
from src.services.vinberg_service import get_vinberg_service

controller_option = click.option(
    "--controller", default=None, help='Controlling vector v0 with v0² > 0, e.g. "1,1,0"'
)
bound_option = click.option(
    "--bound", type=int, default=None, help="Height bound of the rank-2 witness search"
)


def budget_inputs(budget: Budget | None) -> dict[str, Any] | None:
    """Budget as stored in certificate inputs."""
    return budget.model_dump(mode="json") if budget is not None else None


def reflective_job(path: str, budget: dict[str, Any] | None, bound: int | None) -> BatchItem:
    """Decide reflectivity of one lattice file. Runs in a worker process."""
    try:
        lattice, _ = read_lattice_file(Path(path))
        verdict = get_certificate_service().compute(
            "reflective", lattice, {"budget": budget, "bound": bound}
        )
        return BatchItem(source=path, success=True, data=verdict.model_dump(mode="json"))
    except LatticeToolError as e:
        return BatchItem(source=path, success=False, error=e.detail)


@click.command("roots")
@lattice_option
@controller_option
@budget_priority_option
@click.option("--norms", default=None, help='Allowed negative norms, e.g. "-2,-4"')
@out_option
def roots(
    lattice_path: Path,
    controller: str | None,
    budget_priority: str | None,
    norms: str | None,
    out: Path | None,
) -> None:
    """List negative roots by priority (δ·v0)²/|δ²| up to a bound."""
    with command_scope("roots") as scope:
        lattice = scope.lattice(lattice_path)
        if controller is not None:
            vector = parse_rational_vector(controller)
        else:
            vector = tuple(str(c) for c in get_vinberg_service().default_controller(lattice))
        try:
            limit = parse_rational(budget_priority or get_settings().vinberg_max_priority)
        except ValueError as e:
            raise LatticeToolError(ErrorCode.INVALID_ARGUMENT, str(e)) from e
        inputs = {
            "controlling_vector": list(vector),
            "max_priority": format_rational(limit),
            "norms": list(parse_int_vector(norms)) if norms is not None else None,
        }
        result = get_certificate_service().compute("roots", lattice, inputs)
        scope.finish(result, kind="roots", lattice=lattice, inputs=inputs, out=out)


@click.command("vinberg")
@lattice_option
@controller_option
@budget_walls_option
@budget_priority_option
@out_option
def vinberg(
    lattice_path: Path,
    controller: str | None,
    budget_walls: int | None,
    budget_priority: str | None,
    out: Path | None,
) -> None:
    """Run Vinberg's algorithm; exit 2 when the budget ends before finite volume."""
    with command_scope("vinberg") as scope:
        lattice = scope.lattice(lattice_path)
        inputs = {
            "controlling_vector": list(parse_int_vector(controller)) if controller else None,
            "budget": budget_inputs(make_budget(budget_walls, budget_priority)),
        }
        result = get_certificate_service().compute("vinberg", lattice, inputs)
        assert isinstance(result, FundamentalPolyhedron)
        scope.finish(
            result,
            kind="vinberg",
            lattice=lattice,
            inputs=inputs,
            out=out,
            indeterminate=result.status == "Partial",
        )


@click.command("reflective")
@lattices_option
@budget_walls_option
@budget_priority_option
@bound_option
@jobs_option
@out_option
def reflective(
    lattice_paths: tuple[Path, ...],
    budget_walls: int | None,
    budget_priority: str | None,
    bound: int | None,
    jobs: int | None,
    out: Path | None,
) -> None:
    """Decide reflectivity; exit 0 for Reflective and 2 for Indeterminate."""
    with command_scope("reflective") as scope:
        budget = budget_inputs(make_budget(budget_walls, budget_priority))
        if len(lattice_paths) == 1:
            lattice = scope.lattice(lattice_paths[0])
            inputs = {"budget": budget, "bound": bound}
            result = get_certificate_service().compute("reflective", lattice, inputs)
            assert isinstance(result, ReflectivityVerdict)
            scope.finish(
                result,
                kind="reflective",
                lattice=lattice,
                inputs=inputs,
                out=out,
                indeterminate=result.verdict == "Indeterminate",
            )
            return

        if out is not None:
            raise LatticeToolError(ErrorCode.USAGE_ERROR, "--out needs a single --lattice")
        paths = [str(path) for path in lattice_paths]
        scope.blobs.extend(read_blobs(paths))
        job = partial(reflective_job, budget=budget, bound=bound)
        items = run_batch(job, paths, jobs or get_settings().jobs)
        undecided = any(
            item.success and item.data["verdict"] == "Indeterminate" for item in items
        )
        scope.finish(BatchReport(items=items), indeterminate=undecided)
        if not all(item.success for item in items):
            scope.exit_code = EXIT_ERROR


@click.command("reduce-w2")
@lattice_option
@click.option(
    "--action",
    "action_path",
    type=click.Path(path_type=Path, dir_okay=False),
    required=True,
    help="Matrix file of an integral isometry",
)
@click.option("--point", default=None, help="Interior point p with p² > 0 (defaults to v0 moved off every (−2) mirror)")
@click.option("--max-steps", type=int, default=None, help="Maximum number of walk steps")
@out_option
def reduce_w2(
    lattice_path: Path,
    action_path: Path,
    point: str | None,
    max_steps: int | None,
    out: Path | None,
) -> None:
    """Reduce an isometry modulo W^(−2) by walking chambers."""
    with command_scope("reduce-w2") as scope:
        lattice = scope.lattice(lattice_path)
        inputs = {
            "action": scope.matrix(action_path),
            "point": list(parse_rational_vector(point)) if point else None,
            "max_steps": max_steps,
        }
        result = get_certificate_service().compute("reduce-w2", lattice, inputs)
        assert isinstance(result, WalkResult)
        scope.finish(
            result,
            kind="reduce-w2",
            lattice=lattice,
            inputs=inputs,
            out=out,
            indeterminate=result.budget_exceeded,
        )


@click.command("generators")
@lattice_option
@budget_walls_option
@budget_priority_option
@out_option
def generators(
    lattice_path: Path,
    budget_walls: int | None,
    budget_priority: str | None,
    out: Path | None,
) -> None:
    """List generating letters of {±1}W(N) from the chamber walls."""
    with command_scope("generators") as scope:
        lattice = scope.lattice(lattice_path)
        inputs = {"budget": budget_inputs(make_budget(budget_walls, budget_priority))}
        result = get_certificate_service().compute("generators", lattice, inputs)
        assert isinstance(result, GeneratingSet)
        scope.finish(
            result,
            kind="generators",
            lattice=lattice,
            inputs=inputs,
            out=out,
            indeterminate=not result.complete,
        )
