"""Certificate commands."""

from pathlib import Path

import click

from src.cli.common import command_scope
from src.services.certificate_service import get_certificate_service


@click.command("verify")
@click.argument("certificate_path", type=click.Path(path_type=Path, dir_okay=False))
def verify(certificate_path: Path) -> None:
    """Replay a certificate; exit 0 when every check passes and 1 otherwise."""
    with command_scope("verify") as scope:
        service = get_certificate_service()
        certificate = service.load(certificate_path)
        scope.blobs.append(certificate_path.read_bytes())
        scope.finish(service.verify(certificate))
