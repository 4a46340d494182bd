import colorama
from pytest import mark

from surfacer import templating


@mark.parametrize(
    "status, color",
    [("TRAINED", "green"), ("failed", "red"), ("ERROR", "red"), (None, "green")],
)
def test_status_color(status, color):
    """Should color failure statuses red regardless of case."""
    assert templating._status_color_filter(status) == color


def test_verdict_filter():
    """Should label audit outcomes with colored PASS and FAIL."""
    assert templating._verdict_filter(True) == (
        f"{colorama.Fore.GREEN}PASS{colorama.Style.RESET_ALL}"
    )
    assert "FAIL" in templating._verdict_filter(False)


def test_single_line_filter():
    """Should collapse a multi-line docstring onto one line."""
    docs = "\n    Train Gaussians\n    on the configured scene.\n"
    assert templating._single_line_filter(docs) == (
        "Train Gaussians on the configured scene."
    )


def test_yaml_filter_keeps_order():
    """Should dump result info indented and in insertion order."""
    dumped = templating._yaml_filter({"iterations": 6, "gaussians": 40}, indent=2)
    assert dumped == "  iterations: 6\n  gaussians: 40\n"
    assert templating._yaml_filter({}) == ""


def test_print_error_with_trace(capsys):
    """Should print the message followed by the traceback of the error."""
    try:
        raise ValueError("band collapsed")
    except ValueError as error:
        templating.print_error("Prior update failed.", error)

    out = capsys.readouterr().out
    assert "Prior update failed." in out
    assert "ValueError: band collapsed" in out
