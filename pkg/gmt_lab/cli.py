"""CLI entry point for gmt-lab."""

import json
import logging
import sys
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .analyses import run_analyses
from .config import Config
from .document import build_fragment, corpus_names, document_schema, expand_analyses, load_document
from .errors import CertificateError, DocumentError, GmtLabError, LawViolationError, PayloadError
from .linear import load_certificate
from .report import render_text
from .states import build_probabilistic_system, verify_certificate

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_LAW_VIOLATION = 3

MAX_LISTED_VIOLATIONS = 5

logger = logging.getLogger(__name__)


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def _load_config(config_path: Optional[Path]) -> Config:
    if config_path:
        logger.info(f"Loading configuration from {config_path}")
        return Config.load_from_file(config_path)
    return Config.load_from_file()


@click.group()
@click.version_option(__version__, prog_name="gmt-lab")
def main() -> None:
    """Finite fragments of generalized measurement theories: states, structure and GPT embeddings."""


@main.command()
@click.argument("document")
@click.option("--analyses", "-a", default=None, help="Comma-separated analyses (overrides the document)")
@click.option("--bound", "-b", type=int, default=None, help="Outcome-set bound (overrides the document)")
@click.option(
    "--report",
    "report_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Write the JSON report to this file",
)
@click.option("--text", is_flag=True, help="Print the plain-text narrative")
@click.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(exists=False, path_type=Path),
    help="Path to configuration file",
)
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
def run(
    document: str,
    analyses: Optional[str],
    bound: Optional[int],
    report_path: Optional[Path],
    text: bool,
    config_path: Optional[Path],
    verbose: bool,
) -> None:
    """Build the fragment described by DOCUMENT (a path or corpus:<name>) and run its analyses."""
    _setup_logging(verbose)
    config = _load_config(config_path)

    try:
        doc = load_document(document)
        names = expand_analyses(analyses.split(","), location="--analyses") if analyses else doc.analyses
        if bound is not None and bound < 1:
            raise DocumentError(f"Bound must be at least 1, got {bound}", location="--bound")
        frag = build_fragment(doc, bound, config.fragment)
        report = run_analyses(frag, doc, config, names)
    except (DocumentError, PayloadError) as e:
        location = getattr(e, "location", "")
        click.echo(f"Schema error{f' at {location}' if location else ''}: {e}", err=True)
        sys.exit(EXIT_SCHEMA)
    except LawViolationError as e:
        click.echo(f"Law violation: {e}", err=True)
        for violation in e.violations[:MAX_LISTED_VIOLATIONS]:
            click.echo(f"  {violation}", err=True)
        sys.exit(EXIT_LAW_VIOLATION)

    if report_path is not None:
        report_path.write_text(report.to_json() + "\n", encoding="utf-8")
        logger.info(f"Report written to {report_path}")
    if text:
        click.echo(render_text(report, config.report))
    elif report_path is None:
        click.echo(report.to_json())
    sys.exit(EXIT_LAW_VIOLATION if report.law_violation else EXIT_OK)


@main.command()
def schema() -> None:
    """Print the JSON schema of fragment documents."""
    click.echo(json.dumps(document_schema(), indent=2))


@main.command()
def corpus() -> None:
    """List the shipped example documents."""
    for name in corpus_names():
        doc = load_document(f"corpus:{name}")
        click.echo(f"{name}: {doc.description or doc.name}")


@main.command("verify-cert")
@click.argument("document")
@click.argument("certificate", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--bound", "-b", type=int, default=None, help="Outcome-set bound (overrides the document)")
@click.option(
    "--config",
    "-c",
    "config_path",
    type=click.Path(exists=False, path_type=Path),
    help="Path to configuration file",
)
def verify_cert(document: str, certificate: Path, bound: Optional[int], config_path: Optional[Path]) -> None:
    """Replay a stored Farkas certificate against the probabilistic-state system of DOCUMENT."""
    config = _load_config(config_path)
    try:
        doc = load_document(document)
        frag = build_fragment(doc, bound, config.fragment)
        cert = load_certificate(certificate.read_text(encoding="utf-8"), build_probabilistic_system(frag))
        valid = verify_certificate(frag, cert)
    except DocumentError as e:
        click.echo(f"Schema error{f' at {e.location}' if e.location else ''}: {e}", err=True)
        sys.exit(EXIT_SCHEMA)
    except CertificateError as e:
        click.echo(f"Certificate does not match: {e}", err=True)
        sys.exit(1)
    except GmtLabError as e:
        click.echo(f"Error: {e}", err=True)
        sys.exit(1)
    click.echo("certificate valid" if valid else "certificate INVALID")
    sys.exit(EXIT_OK if valid else 1)


if __name__ == "__main__":
    main()
