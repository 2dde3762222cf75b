"""Shared CLI helpers: input parsing, reports, certificates and exit codes."""

import hashlib
import json
import sys
from collections.abc import Callable, Iterator
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import click
import structlog
from pydantic import BaseModel, ValidationError

from src.config import get_settings
from src.exceptions import LatticeToolError
from src.schemas.certificate import CertificateKind
from src.schemas.common import BatchItem, ErrorCode, Provenance, Report, parse_rational
from src.schemas.lattice import Lattice, LatticeFile
from src.schemas.mukai import MukaiVector
from src.schemas.vinberg import Budget
from src.services.certificate_service import CONVENTIONS, get_certificate_service
from src.services.lattice_service import get_lattice_service

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INDETERMINATE = 2


def echo_report(report: Report[Any]) -> None:
    """Print a report as indented JSON on stdout."""
    click.echo(report.model_dump_json(indent=2))


def read_lattice_file(path: Path) -> tuple[Lattice, bytes]:
    """Load a lattice file ({"name": ..., "gram": [[...]]})."""
    try:
        raw = path.read_bytes()
        parsed = LatticeFile.model_validate(json.loads(raw))
    except (OSError, json.JSONDecodeError, UnicodeDecodeError, ValidationError) as e:
        raise LatticeToolError(ErrorCode.MALFORMED_INPUT, f"cannot read lattice {path}: {e}") from e
    lattice = get_lattice_service().make_lattice(parsed.gram, name=parsed.name or path.stem)
    return lattice, raw


def read_matrix_file(path: Path) -> tuple[list[list[str]], bytes]:
    """Load a matrix file: an array of arrays of integers or "p/q" strings."""
    try:
        raw = path.read_bytes()
        rows = json.loads(raw)
        if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
            raise ValueError("expected an array of arrays")
        normalized = [[str(parse_rational(entry)) for entry in row] for row in rows]
    except (OSError, json.JSONDecodeError, UnicodeDecodeError, ValueError) as e:
        raise LatticeToolError(ErrorCode.MALFORMED_INPUT, f"cannot read matrix {path}: {e}") from e
    return normalized, raw


def parse_int_vector(text: str) -> tuple[int, ...]:
    """Parse "a,b,c" into integers."""
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as e:
        raise LatticeToolError(ErrorCode.MALFORMED_INPUT, f"not an integer vector: {text!r}") from e


def parse_rational_vector(text: str) -> tuple[str, ...]:
    """Parse "a,b/c,d" into normalized rational strings."""
    try:
        return tuple(str(parse_rational(part)) for part in text.split(","))
    except ValueError as e:
        raise LatticeToolError(ErrorCode.MALFORMED_INPUT, f"not a rational vector: {text!r}") from e


def parse_mukai_vector(text: str) -> MukaiVector:
    """Parse "r;h1,h2,...;s" into a Mukai vector."""
    parts = text.split(";")
    if len(parts) != 3:
        raise LatticeToolError(ErrorCode.MALFORMED_INPUT, f"expected r;H;s, got {text!r}")
    try:
        return MukaiVector(r=int(parts[0]), H=parse_int_vector(parts[1]), s=int(parts[2]))
    except ValueError as e:
        raise LatticeToolError(ErrorCode.MALFORMED_INPUT, f"bad Mukai vector {text!r}") from e


def make_budget(walls: int | None, priority: str | None) -> Budget | None:
    """Build a Vinberg budget from flags, filling the missing half from settings."""
    if walls is None and priority is None:
        return None
    settings = get_settings()
    try:
        return Budget(
            max_walls=walls if walls is not None else settings.vinberg_max_walls,
            max_priority=priority if priority is not None else settings.vinberg_max_priority,
        )
    except ValidationError as e:
        raise LatticeToolError(ErrorCode.INVALID_ARGUMENT, f"bad budget: {e}") from e


class CommandScope:
    """Collects inputs of one command and writes its report and certificate."""

    def __init__(self, command: str) -> None:
        self.command = command
        self.blobs: list[bytes] = []
        self.exit_code = EXIT_OK

    def lattice(self, path: Path) -> Lattice:
        """Load a lattice input."""
        lattice, raw = read_lattice_file(path)
        self.blobs.append(raw)
        return lattice

    def matrix(self, path: Path) -> list[list[str]]:
        """Load a matrix input."""
        rows, raw = read_matrix_file(path)
        self.blobs.append(raw)
        return rows

    def provenance(self) -> Provenance:
        """Describe where this report came from."""
        digest = hashlib.sha256()
        for blob in self.blobs:
            digest.update(blob)
        return Provenance(
            version=get_settings().app_version,
            command=self.command,
            input_digest=f"sha256:{digest.hexdigest()}",
            conventions=list(CONVENTIONS),
        )

    def finish(
        self,
        result: BaseModel,
        *,
        kind: CertificateKind | None = None,
        lattice: Lattice | None = None,
        inputs: dict[str, Any] | None = None,
        out: Path | None = None,
        indeterminate: bool = False,
    ) -> None:
        """Print the success report, write the certificate and set the exit code."""
        echo_report(Report.ok(result, self.provenance()))
        if out is not None and kind is not None:
            service = get_certificate_service()
            certificate = service.emit(kind, lattice, inputs or {}, result)
            service.write(certificate, out)
        self.exit_code = EXIT_INDETERMINATE if indeterminate else EXIT_OK


@contextmanager
def command_scope(command: str) -> Iterator[CommandScope]:
    """Run a command body, turning errors into failure reports and exit codes."""
    scope = CommandScope(command)
    try:
        yield scope
    except LatticeToolError as e:
        logger.info("Command failed", command=command, code=e.code.value, message=e.message)
        echo_report(Report.fail(e.code, e.message, scope.provenance()))
        scope.exit_code = EXIT_ERROR
    except Exception as e:
        logger.error("Unhandled exception", command=command, error=str(e), exc_info=True)
        echo_report(
            Report.fail(ErrorCode.INTERNAL_ERROR, "An internal error occurred", scope.provenance())
        )
        scope.exit_code = EXIT_ERROR
    click.get_current_context().exit(scope.exit_code)


class ReportingGroup(click.Group):
    """Click group whose usage errors become failure reports with exit code 1."""

    def main(  # type: ignore[override]
        self,
        args: list[str] | None = None,
        prog_name: str | None = None,
        complete_var: str | None = None,
        standalone_mode: bool = True,
        **extra: Any,
    ) -> Any:
        try:
            code = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.ClickException as e:
            echo_report(Report.fail(ErrorCode.USAGE_ERROR, e.format_message()))
            code = EXIT_ERROR
        except click.Abort:
            code = EXIT_ERROR
        sys.exit(code if isinstance(code, int) else EXIT_OK)


lattice_option = click.option(
    "--lattice",
    "lattice_path",
    type=click.Path(path_type=Path, dir_okay=False),
    required=True,
    help="Lattice file",
)
out_option = click.option(
    "--out",
    type=click.Path(path_type=Path, dir_okay=False),
    default=None,
    help="Write a replayable certificate here",
)
budget_walls_option = click.option(
    "--budget-walls", type=int, default=None, help="Maximum number of Vinberg walls"
)
budget_priority_option = click.option(
    "--budget-priority", type=str, default=None, help="Maximum Vinberg priority (rational)"
)

lattices_option = click.option(
    "--lattice",
    "lattice_paths",
    type=click.Path(path_type=Path, dir_okay=False),
    multiple=True,
    required=True,
    help="Lattice file (repeatable)",
)
jobs_option = click.option(
    "--jobs", type=int, default=None, help="Worker processes when several lattices are given"
)


def run_batch(job: Callable[[str], BatchItem], paths: list[str], jobs: int) -> list[BatchItem]:
    """Run a job over input files; results are ordered by filename."""
    if jobs < 1:
        raise LatticeToolError(ErrorCode.INVALID_ARGUMENT, f"--jobs must be positive, got {jobs}")
    ordered = sorted(paths)
    logger.info("Batch started", files=len(ordered), jobs=jobs)
    if jobs == 1 or len(ordered) == 1:
        return [job(path) for path in ordered]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(job, ordered))


def read_blobs(paths: list[str]) -> list[bytes]:
    """Raw bytes of the batch inputs in filename order, for the provenance digest."""
    blobs = []
    for path in sorted(paths):
        try:
            blobs.append(Path(path).read_bytes())
        except OSError:
            blobs.append(b"")
    return blobs
