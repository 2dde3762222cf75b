"""Reflection commands."""

from pathlib import Path

import click

from src.cli.common import (
    command_scope,
    lattice_option,
    out_option,
    parse_int_vector,
)
from src.services.certificate_service import get_certificate_service

mirror_option = click.option("--H", "mirror", required=True, help='Mirror vector, e.g. "1,0,-1"')
action_option = click.option(
    "--action",
    "action_path",
    type=click.Path(path_type=Path, dir_okay=False),
    required=True,
    help="Matrix file of the isometry (rows of integers or \"p/q\")",
)


@click.command("reflect")
@lattice_option
@mirror_option
@out_option
def reflect(lattice_path: Path, mirror: str, out: Path | None) -> None:
    """Print the reflection in H, its classification and whether H is a root."""
    with command_scope("reflect") as scope:
        lattice = scope.lattice(lattice_path)
        inputs = {"mirror": list(parse_int_vector(mirror))}
        result = get_certificate_service().compute("reflect", lattice, inputs)
        scope.finish(result, kind="reflect", lattice=lattice, inputs=inputs, out=out)


@click.command("decompose")
@lattice_option
@action_option
@out_option
def decompose(lattice_path: Path, action_path: Path, out: Path | None) -> None:
    """Write a rational isometry as a signed product of reflections."""
    with command_scope("decompose") as scope:
        lattice = scope.lattice(lattice_path)
        inputs = {"action": scope.matrix(action_path)}
        result = get_certificate_service().compute("decompose", lattice, inputs)
        scope.finish(result, kind="decompose", lattice=lattice, inputs=inputs, out=out)
