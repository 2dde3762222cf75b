"""Lattice-core commands."""

from pathlib import Path

import click

from src.cli.common import (
    EXIT_ERROR,
    command_scope,
    jobs_option,
    lattice_option,
    lattices_option,
    out_option,
    read_blobs,
    read_lattice_file,
    run_batch,
)
from src.config import get_settings
from src.exceptions import LatticeToolError
from src.schemas.common import BatchItem, BatchReport, ErrorCode
from src.schemas.lattice import SimilarityResult
from src.services.certificate_service import get_certificate_service
from src.services.lattice_service import get_lattice_service


def lattice_info_job(path: str) -> BatchItem:
    """Summarize one lattice file. Runs in a worker process."""
    try:
        lattice, _ = read_lattice_file(Path(path))
        info = get_lattice_service().info(lattice)
        return BatchItem(source=path, success=True, data=info.model_dump(mode="json"))
    except LatticeToolError as e:
        return BatchItem(source=path, success=False, error=e.detail)


@click.command("lattice-info")
@lattices_option
@jobs_option
@out_option
def lattice_info(lattice_paths: tuple[Path, ...], jobs: int | None, out: Path | None) -> None:
    """Show rank, determinant, signature and parity."""
    with command_scope("lattice-info") as scope:
        if len(lattice_paths) == 1:
            lattice = scope.lattice(lattice_paths[0])
            info = get_lattice_service().info(lattice)
            scope.finish(info, kind="lattice-info", lattice=lattice, out=out)
            return

        if out is not None:
            raise LatticeToolError(ErrorCode.USAGE_ERROR, "--out needs a single --lattice")
        paths = [str(path) for path in lattice_paths]
        scope.blobs.extend(read_blobs(paths))
        items = run_batch(lattice_info_job, paths, jobs or get_settings().jobs)
        scope.finish(BatchReport(items=items))
        if not all(item.success for item in items):
            scope.exit_code = EXIT_ERROR


@click.command("disc")
@lattice_option
@out_option
def disc(lattice_path: Path, out: Path | None) -> None:
    """Compute the discriminant group and form."""
    with command_scope("disc") as scope:
        lattice = scope.lattice(lattice_path)
        form = get_lattice_service().discriminant_form(lattice)
        scope.finish(form, kind="disc", lattice=lattice, out=out)


@click.command("similar")
@lattice_option
@click.option(
    "--other",
    "other_path",
    type=click.Path(path_type=Path, dir_okay=False),
    required=True,
    help="Second lattice file",
)
@click.option("--bound", type=int, default=None, help="Height bound of the isomorphism search")
@out_option
def similar(lattice_path: Path, other_path: Path, bound: int | None, out: Path | None) -> None:
    """Decide whether the second lattice is L(m) for a positive rational m."""
    with command_scope("similar") as scope:
        lattice = scope.lattice(lattice_path)
        other = scope.lattice(other_path)
        inputs = {
            "other": {"name": other.name, "gram": [list(row) for row in other.gram]},
            "bound": bound,
        }
        result = get_certificate_service().compute("similar", lattice, inputs)
        assert isinstance(result, SimilarityResult)
        scope.finish(
            result,
            kind="similar",
            lattice=lattice,
            inputs=inputs,
            out=out,
            indeterminate=result.similar is None,
        )
