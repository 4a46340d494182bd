"""Assertions applied to each command of a scenario run."""
from surfacer import definitions
from surfacer import interactivity


def _assert_subset(value: str, label: str, expected: dict, actual: dict):
    """Require every expected key to appear in actual with the same value."""
    missing = {k: v for k, v in expected.items() if (actual or {}).get(k) != v}
    assert not missing, f"""
        Command "{value}" reported {label} {actual}
        which does not match the expected entries {missing}.
        """


def assert_command_result(
    command: "definitions.DataWrapper",
    execution: "interactivity.Execution",
):
    """
    Check one scenario command against its expected block.

    The block may name the status, a subset of the info mapping, a subset of
    the step counters a training run reports and the artifact paths the
    command should have written under the output directory.
    """
    value = command.get("command")
    expected = command.get("expected")
    result = execution.result
    assert result is not None, f'Command "{value}" produced no result.'

    if status := expected.get("status"):
        assert result.status == status, f"""
            Command "{value}" finished as "{result.status}" instead of "{status}":
            {result.message}
            """

    if info := expected.get("info"):
        _assert_subset(value, "info", info, result.info)

    if counters := expected.get("counters"):
        _assert_subset(value, "counters", counters, (result.info or {}).get("counters"))

    directory = execution.context.output_directory
    for artifact in expected.get("artifacts") or []:
        assert directory.joinpath(artifact).exists(), f"""
            Command "{value}" did not write "{artifact}" into {directory}.
            """
