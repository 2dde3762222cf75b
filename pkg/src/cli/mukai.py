"""Mukai-vector and correspondence commands."""

from pathlib import Path

import click

from src.cli.common import (
    command_scope,
    lattice_option,
    out_option,
    parse_int_vector,
    parse_mukai_vector,
    parse_rational_vector,
)
from src.schemas.mukai import TyurinResult
from src.services.certificate_service import get_certificate_service
from src.services.lattice_service import get_lattice_service

sign_option = click.option(
    "--sign", type=click.Choice(["1", "-1"]), default=None, help="Sign ε of the transcendental part"
)


@click.command("mukai-moduli")
@lattice_option
@click.option("--v", "mukai_vector", required=True, help='Mukai vector "r;h1,...,hn;s"')
@click.option("--compare", is_flag=True, help="Also test M against the Picard lattice N")
@click.option("--bound", type=int, default=None, help="Height bound of the comparison")
@out_option
def mukai_moduli(
    lattice_path: Path, mukai_vector: str, compare: bool, bound: int | None, out: Path | None
) -> None:
    """Compute the Picard lattice v^⊥/ℤv of the moduli space M(v)."""
    with command_scope("mukai-moduli") as scope:
        lattice = scope.lattice(lattice_path)
        vector = parse_mukai_vector(mukai_vector)
        inputs = {"v": vector.model_dump(mode="json"), "compare": compare, "bound": bound}
        result = get_certificate_service().compute("mukai-moduli", lattice, inputs)
        scope.finish(result, kind="mukai-moduli", lattice=lattice, inputs=inputs, out=out)


@click.command("tyurin")
@lattice_option
@click.option("--H", "mirror", required=True, help='Vector H of N with H² ≠ 0, e.g. "0,1"')
@sign_option
@click.option("--reduce", is_flag=True, help="Also reduce s_H modulo W^(−2)")
@click.option("--point", default=None, help="Interior point for the reduction walk")
@out_option
def tyurin(
    lattice_path: Path,
    mirror: str,
    sign: str | None,
    reduce: bool,
    point: str | None,
    out: Path | None,
) -> None:
    """Build the Tyurin vector of H and the reflection it induces on N."""
    with command_scope("tyurin") as scope:
        lattice = scope.lattice(lattice_path)
        vector = parse_int_vector(mirror)
        if sign is None:
            sign = "-1" if get_lattice_service().norm(lattice, vector) < 0 else "1"
        inputs = {
            "H": list(vector),
            "sign": int(sign),
            "point": list(parse_rational_vector(point)) if point else None,
            "reduce": reduce,
        }
        result = get_certificate_service().compute("tyurin", lattice, inputs)
        assert isinstance(result, TyurinResult)
        scope.finish(
            result,
            kind="tyurin",
            lattice=lattice,
            inputs=inputs,
            out=out,
            indeterminate=result.coset is not None and result.coset.budget_exceeded,
        )


@click.command("corr-decompose")
@lattice_option
@click.option(
    "--action",
    "action_path",
    type=click.Path(path_type=Path, dir_okay=False),
    required=True,
    help="Matrix file of the action on N",
)
@sign_option
@out_option
def corr_decompose(lattice_path: Path, action_path: Path, sign: str | None, out: Path | None) -> None:
    """Write a correspondence action as ± a word in root and Tyurin reflections."""
    with command_scope("corr-decompose") as scope:
        lattice = scope.lattice(lattice_path)
        inputs = {"action": scope.matrix(action_path), "sign": int(sign or "1")}
        result = get_certificate_service().compute("corr-decompose", lattice, inputs)
        scope.finish(result, kind="corr-decompose", lattice=lattice, inputs=inputs, out=out)


@click.command("aut-orders")
@click.option("--rank-t", type=int, required=True, help="Rank of the transcendental lattice")
@out_option
def aut_orders(rank_t: int, out: Path | None) -> None:
    """List the possible orders of the cyclic action on T(X)."""
    with command_scope("aut-orders") as scope:
        inputs = {"rank_t": rank_t}
        result = get_certificate_service().compute("aut-orders", None, inputs)
        scope.finish(result, kind="aut-orders", inputs=inputs, out=out)
