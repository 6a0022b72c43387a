import numpy as np
import pytest

from peerclass.errors import ValidationError
from peerclass.evalharness.compare import compare, least_squares_slope, write_comparison
from peerclass.evalharness.experiment import (
    EvalReport,
    ExperimentConfig,
    FixtureMatrices,
    _binned_indices,
    _holdout_signups,
    fixture_hash,
    run_experiment,
    stratified_split,
)
from peerclass.evalharness.synth import SynthConfig, generate
from peerclass.recsys.features import BINNED_LEVELS, snap_to_level
from peerclass.recsys.registry import ModelConfig

SMALL = SynthConfig(seed=9, n_students=60, n_classes=8, n_tags=10, base_rate=0.05)


def small_repo():
    return generate(SMALL)


def small_config(version, **kw):
    return ExperimentConfig(
        version=version,
        model=ModelConfig(logreg_epochs=50, mlp_epochs=50, forest_trees=5, allow_constant=True),
        min_signups=3,
        **kw,
    )


class TestFixtureMatrices:
    def test_taken_matrix_matches_enrollments(self):
        repo = small_repo()
        mats = FixtureMatrices.from_repo(repo)
        row = {sid: i for i, sid in enumerate(mats.student_ids)}
        col = {cid: j for j, cid in enumerate(mats.snapshot.class_ids)}
        expected = np.zeros_like(mats.taken)
        for link in repo.all("enrollments"):
            expected[row[link.student_id], col[link.class_id]] = 1.0
        assert np.array_equal(mats.taken, expected)

    def test_sims_match_direct_jaccard(self):
        from peerclass.recsys.similarity import student_interest_tags, tag_similarity

        repo = small_repo()
        mats = FixtureMatrices.from_repo(repo)
        for i, sid in enumerate(mats.student_ids[:5]):
            interest = student_interest_tags(repo, sid)
            for j, cid in enumerate(mats.snapshot.class_ids):
                assert mats.sims[i, j] == tag_similarity(mats.snapshot.tags[cid], interest)

    def test_fixture_hash_stable(self):
        assert fixture_hash(small_repo()) == fixture_hash(small_repo())
        assert fixture_hash(small_repo()) != fixture_hash(generate(SynthConfig(seed=10, n_students=60, n_classes=8, n_tags=10)))


class TestSplits:
    def test_stratified_split_properties(self):
        rng = np.random.default_rng(0)
        y = np.array([0.0] * 40 + [1.0] * 10)
        train, test = stratified_split(y, 0.2, rng)
        assert sorted(np.concatenate([train, test]).tolist()) == list(range(50))
        assert set(train.tolist()).isdisjoint(test.tolist())
        # both label values present on both sides at 80/20 with 40/10 rows
        assert {0.0, 1.0} <= set(y[train].tolist())
        assert {0.0, 1.0} <= set(y[test].tolist())
        assert len(test) == 8 + 2

    def test_split_deterministic_for_seeded_rng(self):
        y = np.array([0.0, 1.0] * 20)
        a = stratified_split(y, 0.2, np.random.default_rng(7))
        b = stratified_split(y, 0.2, np.random.default_rng(7))
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_holdout_signups_removes_one_fifth(self):
        repo = small_repo()
        mats = FixtureMatrices.from_repo(repo)
        train, heldout = _holdout_signups(mats, seed=0, fraction=0.2)
        assert len(heldout) > 0
        for i, j in heldout:
            assert mats.taken[i, j] == 1.0
            assert train[i, j] == 0.0
        # nothing added, only removed
        assert np.all(train <= mats.taken)
        assert train.sum() + len(heldout) == mats.taken.sum()

    def test_binned_indices_oracle(self):
        taken = np.array([1.0, 0.0, 0.0, 0.0])
        sims = np.array([0.3, 0.0, 0.5, 0.9])
        got = _binned_indices(taken, sims)
        levels = list(BINNED_LEVELS)
        want = [levels.index(1.0)] + [levels.index(snap_to_level(s)) for s in sims[1:]]
        assert got.tolist() == want


class TestRunExperiment:
    def test_unknown_version_rejected(self):
        with pytest.raises(ValidationError):
            run_experiment(small_repo(), ExperimentConfig(version="v9"))

    def test_v1_all_matches_catalog_order_oracle(self):
        repo = small_repo()
        report = run_experiment(repo, small_config("v1_all"))
        mats = FixtureMatrices.from_repo(repo)
        train, heldout = _holdout_signups(mats, seed=0, fraction=0.2)
        hits = 0
        for i, j in heldout:
            top3 = [k for k in range(train.shape[1]) if train[i, k] == 0.0][:3]
            hits += j in top3
        assert report.hit_rate == pytest.approx(hits / len(heldout))
        assert report.metric == "hit_rate_at_3"

    def test_v2_popularity_matches_oracle(self):
        repo = small_repo()
        report = run_experiment(repo, small_config("v2_popularity"))
        mats = FixtureMatrices.from_repo(repo)
        train, heldout = _holdout_signups(mats, seed=0, fraction=0.2)
        pop = train.sum(axis=0)
        order = sorted(range(train.shape[1]), key=lambda j: (-pop[j], mats.snapshot.class_ids[j]))
        hits = 0
        for i, j in heldout:
            top3 = [k for k in order if train[i, k] == 0.0][:3]
            hits += j in top3
        assert report.hit_rate == pytest.approx(hits / len(heldout))

    def test_per_class_report_shape(self):
        repo = small_repo()
        report = run_experiment(repo, small_config("v5_it_bo"))
        assert report.metric == "per_class_accuracy"
        assert report.per_class
        counts = {c.class_id: n for c, n in zip(repo.published_classes(), [0] * 8)}
        signup_counts = repo.signup_counts()
        for class_id, n, acc in report.per_class:
            assert 0.0 <= acc <= 1.0
            assert n == signup_counts[class_id]
            assert n >= 3
        skipped = set(report.skipped_classes)
        for cid in counts:
            if signup_counts.get(cid, 0) < 3:
                assert cid in skipped
        assert report.mean_accuracy == pytest.approx(
            np.mean([a for _, _, a in report.per_class])
        )
        assert report.max_accuracy == max(a for _, _, a in report.per_class)

    def test_v4_binary_aliases_v5_nt_bo(self):
        repo = small_repo()
        a = run_experiment(repo, small_config("v4_binary"))
        b = run_experiment(repo, small_config("v5_nt_bo"))
        assert [(c, n, acc) for c, n, acc in a.per_class] == [(c, n, acc) for c, n, acc in b.per_class]

    def test_report_json_deterministic_and_round_trips(self):
        repo = small_repo()
        a = run_experiment(repo, small_config("v5_it_bo"))
        b = run_experiment(repo, small_config("v5_it_bo"))
        # wall-clock times differ between runs, but the report JSON must not
        assert a.to_json() == b.to_json()
        restored = EvalReport.from_json(a.to_json(), a.timing_json())
        assert restored.per_class == a.per_class
        assert restored.train_seconds_total == a.train_seconds_total
        assert "seconds" not in a.to_json()


class TestCompare:
    def test_slope_matches_polyfit(self):
        rng = np.random.default_rng(0)
        xs = rng.normal(size=30)
        ys = 2.5 * xs + rng.normal(scale=0.1, size=30)
        assert least_squares_slope(xs, ys) == pytest.approx(np.polyfit(xs, ys, 1)[0])

    def test_constant_x_slope_zero(self):
        assert least_squares_slope(np.ones(5), np.arange(5.0)) == 0.0

    def test_mismatched_fixtures_refused(self):
        repo_a = small_repo()
        repo_b = generate(SynthConfig(seed=10, n_students=60, n_classes=8, n_tags=10))
        a = run_experiment(repo_a, small_config("v5_it_bo"))
        b = run_experiment(repo_b, small_config("v5_it_bo"))
        with pytest.raises(ValidationError):
            compare([a, b])

    def test_write_comparison_outputs(self, tmp_path):
        repo = small_repo()
        reports = [run_experiment(repo, small_config(v)) for v in ("v2_popularity", "v5_it_bo")]
        written = write_comparison(compare(reports), str(tmp_path / "out"))
        names = {p.split("/")[-1] for p in written}
        assert "versions.tsv" in names
        assert "model_types.tsv" in names
        assert "slopes.tsv" in names
        assert any(n.startswith("scatter_v5_it_bo") for n in names)
        versions = (tmp_path / "out" / "versions.tsv").read_text().splitlines()
        assert versions[0].startswith("version\t")
        assert len(versions) == 3
