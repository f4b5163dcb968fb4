import numpy as np
import pytest

from cflab import (
    CorrelationTarget,
    DataError,
    ExperimentPlan,
    FileSource,
    SplitPlan,
    SweepReport,
    SweepRow,
    SyntheticSource,
    UndefinedStatisticError,
    emit_report,
    mae,
    make_method,
    read_report,
    run_sweep,
    write_triples,
)
from cflab.harness import (
    default_checkpoints,
    normalize_method,
    parse_config,
    parse_method,
    plan_from_options,
)
from cflab.ingest import TimedTriple


class TestMae:
    def test_perfect_predictions(self):
        assert mae([(3.0, 3.0), (1.0, 1.0)], 4.0) == 0.0

    def test_hand_case(self):
        assert mae([(2.0, 1.0), (5.0, 2.0)], 4.0) == pytest.approx(0.5)

    def test_midpoint_against_extremes(self):
        assert mae([(3.0, 1.0), (3.0, 5.0)], 4.0) == pytest.approx(0.5)

    def test_empty_is_undefined(self):
        with pytest.raises(UndefinedStatisticError):
            mae([], 4.0)

    def test_nonpositive_range_rejected(self):
        with pytest.raises(DataError):
            mae([(1.0, 1.0)], 0.0)

    def test_matches_direct_sum(self, rng):
        pairs = rng.uniform(1, 5, size=(50, 2))
        expected = sum(abs(p - a) for p, a in pairs) / (50 * 4.0)
        assert mae(pairs, 4.0) == pytest.approx(expected, abs=1e-12)


class TestMethodSpecs:
    def test_parse_plain(self):
        assert parse_method("item_mean") == ("item_mean", {})

    def test_parse_with_arguments(self):
        name, kwargs = parse_method("correlation(n_c=4, gamma=1.5)")
        assert name == "correlation"
        assert kwargs == {"n_c": 4, "gamma": 1.5}

    def test_parse_auto_keyword(self):
        assert parse_method("spectral(k=auto)")[1] == {"k": "auto"}

    def test_unknown_method(self):
        with pytest.raises(DataError, match="unknown method"):
            parse_method("mystery")

    def test_bad_arguments(self):
        with pytest.raises(DataError):
            make_method("correlation(bogus_knob=1)")

    def test_normalization_is_stable(self):
        a = normalize_method("correlation(gamma=1.5, n_c=4)")
        b = normalize_method("correlation(n_c=4,gamma=1.5)")
        assert a == b == "correlation(gamma=1.5,n_c=4)"

    def test_make_method_types(self):
        from cflab import (
            BlendRecommender,
            CorrelationRecommender,
            ItemMeanRecommender,
            SpectralRecommender,
            UserMeanRecommender,
        )
        assert isinstance(make_method("item_mean"), ItemMeanRecommender)
        assert isinstance(make_method("user_mean"), UserMeanRecommender)
        assert isinstance(make_method("blend(q=0.5)"), BlendRecommender)
        assert isinstance(make_method("correlation(n_c=2)"), CorrelationRecommender)
        assert isinstance(make_method("spectral(k=4)"), SpectralRecommender)


def tiny_synthetic_plan(checkpoints=(), methods=("item_mean", "user_mean"),
                        n_test=20, seed=0):
    target = CorrelationTarget(n_users=12, mean=0.1, std=0.15, seed=seed)
    source = SyntheticSource(target=target, n_items=10, vote_seed=seed + 1)
    split_plan = SplitPlan("random", n_test=n_test, seed=seed + 2,
                           checkpoints=checkpoints)
    return ExperimentPlan(source=source, split=split_plan, methods=methods)


class TestRunSweep:
    def test_item_mean_is_user_independent(self):
        plan = tiny_synthetic_plan(checkpoints=(0.5,), methods=("item_mean",))
        report = run_sweep(plan)
        assert len(report.rows) == 1
        row = report.rows[0]
        assert row.n_predictions == 20
        assert 0.0 <= row.mae <= 1.0

    def test_rows_ordered_and_complete(self):
        plan = tiny_synthetic_plan(
            checkpoints=(0.4, 0.6),
            methods=("user_mean", "item_mean", "correlation(n_c=2)"))
        report = run_sweep(plan)
        assert len(report.rows) == 6
        keys = [(r.method, r.eta) for r in report.rows]
        assert keys == sorted(keys)
        for row in report.rows:
            assert row.n_predictions == 20
            assert 0.0 <= row.mae <= 1.0

    def test_deterministic_reports(self, tmp_path):
        plan = tiny_synthetic_plan(checkpoints=(0.5,),
                                   methods=("item_mean", "correlation(n_c=2)"))
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        emit_report(run_sweep(plan), a)
        emit_report(run_sweep(plan), b)
        assert a.read_bytes() == b.read_bytes()
        companion_a = tmp_path / "a.csv.diag.txt"
        companion_b = tmp_path / "b.csv.diag.txt"
        assert companion_a.read_bytes() == companion_b.read_bytes()

    def test_provenance_and_fill_fractions(self):
        plan = tiny_synthetic_plan(checkpoints=(0.3, 0.5, 0.7),
                                   methods=("item_mean",))
        report = run_sweep(plan)
        assert "test_hash" in report.provenance
        fills = report.provenance["fill_fractions"]
        assert len(fills) == 3
        etas = [eta for eta, _ in fills]
        fractions = [f for _, f in fills]
        assert etas == sorted(etas)
        assert fractions == sorted(fractions)
        assert fractions[-1] <= 1.0
        assert report.diagnostics["vote_entropy"] > 0

    def test_unreachable_checkpoint_rejected(self):
        plan = tiny_synthetic_plan(checkpoints=(0.99,))
        with pytest.raises(DataError, match="achievable"):
            run_sweep(plan)

    def test_file_source_round_trip(self, tmp_path):
        rng = np.random.default_rng(5)
        triples = [TimedTriple(u, i, float(rng.uniform(1, 5)))
                   for u in range(8) for i in range(6)]
        path = tmp_path / "votes.csv"
        write_triples(triples, path)
        plan = ExperimentPlan(
            source=FileSource(str(path)),
            split=SplitPlan("random", n_test=10, seed=3, checkpoints=(0.5,)),
            methods=("item_mean",))
        report = run_sweep(plan)
        assert report.rows[0].n_predictions == 10

    def test_every_test_pair_is_predicted(self):
        # fallbacks predict rather than skip, so n_predictions == n_test even
        # at a very sparse checkpoint
        plan = tiny_synthetic_plan(checkpoints=(0.05, 0.8),
                                   methods=("correlation(n_c=3)",))
        report = run_sweep(plan)
        for row in report.rows:
            assert row.n_predictions == 20
        sparse_row = report.rows[0]
        assert sparse_row.n_fallbacks > 0


class TestDefaultCheckpoints:
    def test_grid_shape(self):
        grid = default_checkpoints(0.5)
        assert len(grid) == 15
        assert grid[0] == pytest.approx(0.01)
        assert grid[-1] == pytest.approx(0.5)
        ratios = np.diff(np.log(grid))
        np.testing.assert_allclose(ratios, ratios[0], atol=1e-12)


class TestEmitReport:
    def test_empty_report_is_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        emit_report(SweepReport(rows=()), path)
        assert path.read_text() == "method,eta,mae,n_predictions,n_fallbacks\n"

    def test_round_trip_exact(self, tmp_path):
        rows = (
            SweepRow("correlation(gamma=1.5,n_c=3)", 0.123456789012, 0.25, 100, 3),
            SweepRow("item_mean", 0.5, 1 / 3, 100, 0),
        )
        path = tmp_path / "report.csv"
        emit_report(SweepReport(rows=rows), path)
        parsed = read_report(path)
        assert len(parsed) == 2
        for original, back in zip(rows, parsed):
            assert back.method == original.method
            assert back.eta == pytest.approx(original.eta, rel=1e-11)
            assert back.mae == pytest.approx(original.mae, rel=1e-11)
            assert back.n_predictions == original.n_predictions
            assert back.n_fallbacks == original.n_fallbacks

    def test_unwritable_path_raises_data_error(self, tmp_path):
        with pytest.raises(DataError, match="cannot write"):
            emit_report(SweepReport(rows=()), tmp_path / "missing" / "x.csv")

    def test_bad_header_rejected_on_read(self, tmp_path):
        path = tmp_path / "junk.csv"
        path.write_text("definitely,not,a,report\n")
        with pytest.raises(DataError):
            read_report(path)


class TestConfig:
    CONFIG = """
# synthetic sweep
source = synthetic
users = 12
items = 10
mu = 0.1
sigma = 0.15
corr_seed = 0
vote_seed = 1
split = random
n_test = 20
split_seed = 2
checkpoints = 0.4, 0.8
methods = item_mean, correlation(n_c=2, gamma=1.0)
out = report.csv
"""

    def test_parse_config_lines(self):
        options = parse_config("a = 1\n# comment\nb= two  # trailing\n")
        assert options == {"a": "1", "b": "two"}

    def test_malformed_line(self):
        with pytest.raises(DataError, match="line 1"):
            parse_config("just words\n")

    def test_plan_from_config(self):
        plan = plan_from_options(parse_config(self.CONFIG))
        assert isinstance(plan.source, SyntheticSource)
        assert plan.source.target.n_users == 12
        assert plan.split.checkpoints == (0.4, 0.8)
        assert plan.methods == ("item_mean", "correlation(gamma=1.0,n_c=2)")

    def test_unknown_key_rejected(self):
        with pytest.raises(DataError, match="unknown config"):
            plan_from_options({"source": "synthetic", "methods": "item_mean",
                               "wat": "1"})

    def test_file_source_with_reduction(self):
        options = {
            "source": "votes.csv",
            "methods": "item_mean",
            "user_fraction": "0.5",
            "reduce_seed": "4",
            "n_test": "10",
        }
        plan = plan_from_options(options)
        assert isinstance(plan.source, FileSource)
        assert plan.reduction is not None
        assert plan.reduction.user_fraction == 0.5
        assert plan.reduction.seed == 4

    def test_sweep_from_config_runs(self, tmp_path):
        config = tmp_path / "plan.cfg"
        config.write_text(self.CONFIG)
        from cflab import load_plan
        plan = load_plan(config, {"n_test": "15"})
        report = run_sweep(plan)
        assert report.rows[0].n_predictions == 15
