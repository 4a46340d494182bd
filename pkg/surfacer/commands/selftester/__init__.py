"""
Run the numerical property audits and report which of them pass.

Each audit checks an oracle (closed-form fusion, exact trilinear sampling,
finite difference gradients) on a problem small enough to finish in seconds.
"""
import argparse

from surfacer import auditing
from surfacer import interactivity
from surfacer import templating


def populate_subparser(parser: argparse.ArgumentParser):
    """Populate parser for this command."""
    parser.add_argument(
        "audits",
        nargs="*",
        metavar="AUDIT",
        help="Audits to run; all of them when omitted. One of: {}.".format(
            ", ".join(auditing.AUDITS)
        ),
    )


def run(ex: "interactivity.Execution") -> "interactivity.Execution":
    """Execute the property audits."""
    names = ex.args.get("audits") or None
    if unknown := [n for n in names or [] if n not in auditing.AUDITS]:
        return ex.finalize(
            status="FAILED",
            message=f"Unknown audits: {', '.join(unknown)}.",
            echo=True,
        )

    results = auditing.run_audits(names)
    templating.printer("commands/selftester/audits.jinja2", results=results)

    failures = [r.name for r in results if not r.passed]
    return ex.finalize(
        status="FAILED" if failures else "PASSED",
        message=(
            f"{len(failures)} of {len(results)} audits failed."
            if failures
            else f"All {len(results)} audits passed."
        ),
        info={"failed": failures},
        data={"results": [r.serialize() for r in results]},
        echo=True,
    )
