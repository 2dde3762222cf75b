"""CLI command aggregation."""

import click

from src.cli.certificates import verify
from src.cli.common import ReportingGroup, command_scope
from src.cli.lattice import disc, lattice_info, similar
from src.cli.mukai import aut_orders, corr_decompose, mukai_moduli, tyurin
from src.cli.reflection import decompose, reflect
from src.cli.vinberg import generators, reduce_w2, reflective, roots, vinberg
from src.config import get_settings
from src.schemas.common import ToolInfo
from src.services.certificate_service import CONVENTIONS


@click.group(cls=ReportingGroup, context_settings={"help_option_names": ["-h", "--help"]})
def cli() -> None:
    """Exact lattice, reflection and K3 correspondence toolkit."""


@cli.command("version")
def version() -> None:
    """Show the tool version and the conventions certificates are written in."""
    with command_scope("version") as scope:
        scope.finish(ToolInfo(version=get_settings().app_version, conventions=list(CONVENTIONS)))


for command in (
    lattice_info,
    disc,
    similar,
    reflect,
    decompose,
    roots,
    vinberg,
    reflective,
    reduce_w2,
    generators,
    mukai_moduli,
    tyurin,
    corr_decompose,
    aut_orders,
    verify,
):
    cli.add_command(command)
