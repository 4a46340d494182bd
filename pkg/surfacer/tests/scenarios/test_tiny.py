import yaml

from ..scenarios import supports


def test_tiny_scenario_configs():
    """Should display the loaded configuration and reject unknown sections."""
    with supports.ScenarioRunner("tiny/scenario_configs.yaml") as sr:
        sr.check_success()
        sr.check_commands()
        shown = sr.history[1].result.data["configuration"]
        assert shown == {"prior": sr.configuration.get("prior")}


def test_tiny_scenario_help():
    """Should list commands in pipeline order and show the usage of one."""
    with supports.ScenarioRunner("tiny/scenario_help.yaml") as sr:
        sr.check_success()
        sr.check_commands()
        listed = list(sr.history[0].result.data["commands"])
        assert listed[:5] == ["train", "render", "fuse", "extract-mesh", "eval"]
        assert {"configs", "help", "selftest"} <= set(listed)

        usage = sr.history[2].result.data["usage"]
        assert "--literal-eq5, --literal-projection" in usage
        assert "--seed" in usage
        assert sr.history[3].result.data["command"] == "help"


def test_tiny_scenario_selftest():
    """Should pass the selected audits and fail on unknown audit names."""
    with supports.ScenarioRunner("tiny/scenario_selftest.yaml") as sr:
        sr.check_success()
        sr.check_commands()
        results = sr.history[0].result.data["results"]
        assert [r["name"] for r in results] == [
            "trilinear_oracle",
            "scp_gradient",
            "flatten_gradient",
        ]


def test_tiny_scenario_pipeline():
    """Should train, render, fuse, extract and evaluate in one session."""
    with supports.ScenarioRunner("tiny/scenario_pipeline.yaml") as sr:
        sr.check_success()
        sr.check_commands()
        directory = sr.context.output_directory
        assert directory.joinpath("trace.csv").exists()
        assert directory.joinpath("renders", "view_000_depth.pfm").exists()
        assert directory.joinpath("fused.tsdf").exists()

        evaluation = yaml.safe_load(directory.joinpath("eval.yaml").read_text())
        assert evaluation["chamfer_l1"] >= 0
        assert [row["delta"] for row in evaluation["delta_sweep"]] == [0.5, 0.3]

        counters = sr.history[0].result.info["counters"]
        assert counters["prior_update"] == 2
    assert not directory.exists()


def test_tiny_scenario_ablation():
    """Should never touch the prior when it is disabled."""
    with supports.ScenarioRunner("tiny/scenario_ablation.yaml") as sr:
        sr.check_success()
        sr.check_commands()
        counters = sr.history[0].result.info["counters"]
        assert counters.get("prior_update", 0) == 0
        assert counters.get("scp", 0) == 0
        assert sr.context.seed == 3
