"""Acceptance suite.

One test per acceptance criterion, each at its stated tolerance and
runtime budget, printing a `[ACCEPTANCE] <criterion>: PASS` line on
success (run with `pytest tests/test_acceptance.py -v -s`). Paper-scale
figures need proprietary data; everything here is property- and
oracle-based on planted synthetic corpora.
"""

import itertools
import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

import courtvec as cv
from courtvec.cli import run
from courtvec.network import PARAM_NAMES, _loss_and_grads_arrays
from courtvec.simulation import _simulate_series_from_probs


def passed(name):
    print(f"[ACCEPTANCE] {name}: PASS")


# ---------------------------------------------------------------------------
# shared planted corpus (criteria: model recovery, curve shape)
# ---------------------------------------------------------------------------

RECOVERY_PLAYERS = 100
RECOVERY_PLAYS = 200_000
RECOVERY_GAMES = 500
RECOVERY_HOLDOUT_GAMES = 125


@pytest.fixture(scope="module")
def recovery_setup():
    """v=100, h=8, i=32 planted generator (seed 1, Zipf lineups), a
    200k-play/500-game corpus, a chronological holdout and a model
    trained with stock defaults."""
    t0 = time.time()
    generator = cv.plant_generator(
        RECOVERY_PLAYERS, embedding_dim=8, hidden_dim=32, seed=1,
        lineup_sampling="zipf",
    )
    corpus = cv.generate_plays(generator, RECOVERY_PLAYS, RECOVERY_GAMES)
    train_plays, val_plays = cv.chronological_split(corpus, RECOVERY_HOLDOUT_GAMES)

    config = cv.ModelConfig(n_players=RECOVERY_PLAYERS)  # h=8, i=128 defaults
    model = cv.init_model(config, seed=0)
    cv.train(model, train_plays, cv.TrainConfig(seed=0))  # stock defaults
    return {
        "generator": generator,
        "train": train_plays,
        "val": val_plays,
        "model": model,
        "elapsed": time.time() - t0,
    }


# ---------------------------------------------------------------------------
# criterion: gradient oracle
# ---------------------------------------------------------------------------

class TestGradientOracle:
    def test_analytic_gradients_match_finite_differences(self):
        """20 random small models (v=12, h=3, i=5), random 8-play
        batches; every partial within relative error 1e-4 of central
        differences at step 1e-5. Runtime < 5 s."""
        t0 = time.time()
        step = 1e-5
        rng = np.random.default_rng(2024)
        config = cv.ModelConfig(n_players=12, embedding_dim=3, hidden_dim=5)
        for _ in range(20):
            model = cv.EmbeddingModel(
                config,
                embeddings=rng.normal(0, 0.6, (12, 3)),
                w_hidden=rng.normal(0, 0.6, (6, 5)),
                b_hidden=rng.normal(0, 0.6, 5),
                w_out=rng.normal(0, 0.6, (5, 23)),
                b_out=rng.normal(0, 0.6, 23),
            )
            lineups = cv.random_matchups(12, 8, rng)
            outcomes = rng.integers(0, 23, size=8)
            _, analytic = _loss_and_grads_arrays(model, lineups, outcomes)
            for name in PARAM_NAMES:
                arr = getattr(model, name)
                flat = arr.ravel()
                numeric = np.zeros(flat.size)
                for idx in range(flat.size):
                    original = flat[idx]
                    flat[idx] = original + step
                    up, _ = _loss_and_grads_arrays(model, lineups, outcomes)
                    flat[idx] = original - step
                    down, _ = _loss_and_grads_arrays(model, lineups, outcomes)
                    flat[idx] = original
                    numeric[idx] = (up - down) / (2 * step)
                a = getattr(analytic, name).ravel()
                rel = np.abs(a - numeric) / np.maximum(1e-3, np.maximum(np.abs(a), np.abs(numeric)))
                assert rel.max() < 1e-4, f"{name}: max rel err {rel.max():.2e}"
        elapsed = time.time() - t0
        assert elapsed < 5.0, f"gradient oracle took {elapsed:.2f}s"
        passed(f"gradient-oracle ({elapsed:.2f}s)")


# ---------------------------------------------------------------------------
# criterion: permutation invariance
# ---------------------------------------------------------------------------

class TestPermutationInvariance:
    def test_bitwise_equal_forward_under_permutations(self):
        """1000 random (model, lineup) draws x 20 random permutation
        pairs, all bitwise equal. Runtime < 5 s."""
        t0 = time.time()
        rng = np.random.default_rng(7)
        config = cv.ModelConfig(n_players=12, embedding_dim=3, hidden_dim=5)
        for _ in range(1000):
            model = cv.EmbeddingModel(
                config,
                embeddings=rng.normal(0, 1.0, (12, 3)),
                w_hidden=rng.normal(0, 1.0, (6, 5)),
                b_hidden=rng.normal(0, 1.0, 5),
                w_out=rng.normal(0, 1.0, (5, 23)),
                b_out=rng.normal(0, 1.0, 23),
            )
            ten = rng.choice(12, size=10, replace=False)
            offense, defense = ten[:5], ten[5:]
            base = cv.forward(model, offense, defense)
            for _ in range(20):
                probs = cv.forward(model, rng.permutation(offense),
                                   rng.permutation(defense))
                assert np.array_equal(probs, base)
        elapsed = time.time() - t0
        assert elapsed < 5.0, f"permutation check took {elapsed:.2f}s"
        passed(f"permutation-invariance ({elapsed:.2f}s)")


# ---------------------------------------------------------------------------
# criterion: model recovery on the planted corpus
# ---------------------------------------------------------------------------

class TestModelRecovery:
    def test_trained_model_recovers_the_generator(self, recovery_setup):
        """Held-out mean K-L under half the uniform baseline AND mean
        forward-vs-truth K-L over 100 random matchups under 0.1 bits.
        Runtime < 5 min."""
        generator = recovery_setup["generator"]
        model = recovery_setup["model"]
        val = recovery_setup["val"]

        report = cv.validate_matchups(model, val, min_plays=15)
        baseline = cv.uniform_baseline(val, min_plays=15)
        assert not report.empty
        assert report.mean_kl < 0.5 * baseline, (
            f"validation K-L {report.mean_kl:.4f} vs half-baseline {0.5 * baseline:.4f}"
        )

        rows = cv.random_matchups(RECOVERY_PLAYERS, 100, np.random.default_rng(99))
        truth_probs = cv.forward_batch(generator.truth, rows)
        model_probs = cv.forward_batch(model, rows)
        forward_kl = np.mean([
            cv.kl_divergence(truth_probs[i], model_probs[i], base=2) for i in range(100)
        ])
        assert forward_kl < 0.1, f"forward-vs-truth K-L {forward_kl:.4f} bits"

        elapsed = recovery_setup["elapsed"]
        assert elapsed < 300.0, f"corpus + training took {elapsed:.1f}s"
        passed(
            "model-recovery "
            f"(val K-L {report.mean_kl:.3f} < {0.5 * baseline:.3f}, "
            f"forward K-L {forward_kl:.3f} bits, {elapsed:.0f}s)"
        )


# ---------------------------------------------------------------------------
# criterion: K-L vs plays curve shape
# ---------------------------------------------------------------------------

class TestCurveShape:
    def test_plateau_after_about_thirty_plays(self, recovery_setup):
        """With the truth model as predictor (max_n=60, trials=200) the
        window-5 smoothed curve is non-increasing and closes to within
        10% of its final value (relative to the curve's full descent) by
        n <= 40. Runtime < 1 min."""
        t0 = time.time()
        generator = recovery_setup["generator"]
        curve = cv.kl_vs_plays_curve(
            generator.truth, recovery_setup["val"], max_n=60, trials=200, seed=5,
        )
        values = np.array([v for _, v in curve])
        smoothed = np.convolve(values, np.ones(5) / 5, mode="valid")
        assert (np.diff(smoothed) <= 1e-12).all(), "smoothed curve increased"

        final = smoothed[-1]
        descent = smoothed[0] - final
        assert descent > 0
        # smoothed[j] aggregates n = j+1 .. j+5; charge it to n = j+5
        within = np.nonzero(smoothed - final <= 0.1 * descent)[0]
        assert within.size, "curve never settles"
        settle_n = int(within[0]) + 5
        assert settle_n <= 40, f"curve settles at n={settle_n}"

        elapsed = time.time() - t0
        assert elapsed < 60.0, f"curve took {elapsed:.1f}s"
        passed(f"curve-shape (settles by n={settle_n}, {elapsed:.1f}s)")


# ---------------------------------------------------------------------------
# criterion: K-L analytic anchors
# ---------------------------------------------------------------------------

class TestKlAnchors:
    def test_exact_values_and_base_conversion(self):
        assert cv.kl_divergence([1.0, 0.0], [0.5, 0.5], base=2) == 1.0
        rng = np.random.default_rng(11)
        for _ in range(1000):
            p = rng.dirichlet(np.ones(int(rng.integers(2, 24))))
            assert cv.kl_divergence(p, p, base=2) == 0.0
        for _ in range(200):
            p = rng.dirichlet(np.ones(23))
            q = rng.dirichlet(np.ones(23))
            bits = cv.kl_divergence(p, q, base=2)
            nats = cv.kl_divergence(p, q, base=math.e)
            assert abs(bits - nats / math.log(2)) < 1e-12
        passed("kl-analytic-anchors")


# ---------------------------------------------------------------------------
# criterion: series combinatorics
# ---------------------------------------------------------------------------

def best_of_seven_mean_games(p_win):
    """Exact expected series length by enumerating every win/loss
    sequence (first to 4), in exact rational arithmetic."""
    p = Fraction(p_win)
    total = Fraction(0)

    def recurse(wins_a, wins_b, probability):
        nonlocal total
        if wins_a == 4 or wins_b == 4:
            total += probability * (wins_a + wins_b)
            return
        recurse(wins_a + 1, wins_b, probability * p)
        recurse(wins_a, wins_b + 1, probability * (1 - p))

    recurse(0, 0, Fraction(1))
    return total


class TestSeriesCombinatorics:
    def test_mean_games_at_fair_coin(self):
        """Symmetric matchup => per-game win probability exactly 1/2;
        100k-sim mean series length within 0.05 of the enumerated
        5.8125."""
        exact = best_of_seven_mean_games(Fraction(1, 2))
        assert exact == Fraction(93, 16)  # 5.8125
        rng = np.random.default_rng(3)
        logits = rng.normal(0, 1, 23)
        q = np.exp(logits) / np.exp(logits).sum()
        t0 = time.time()
        result = _simulate_series_from_probs(q, q, sims=100_000, possessions=100, seed=17)
        elapsed = time.time() - t0
        assert abs(result.mean_games - float(exact)) < 0.05, result.mean_games
        assert set(result.series_lengths) <= {4, 5, 6, 7}
        passed(
            f"series-combinatorics (mean games {result.mean_games:.4f} "
            f"vs {float(exact)}, {elapsed:.1f}s)"
        )

    def test_deterministic_winner_sweeps_four_zero(self):
        q_a = np.zeros(23)
        q_a[17] = 1.0
        q_b = np.zeros(23)
        q_b[21] = 1.0
        result = _simulate_series_from_probs(q_a, q_b, sims=200, possessions=100, seed=1)
        assert result.mean_series_score == (4.0, 0.0)
        assert result.team_a_series_win_fraction == 1.0
        assert set(result.series_lengths) == {4}
        passed("series-deterministic-sweep")


# ---------------------------------------------------------------------------
# criterion: scoring conservation
# ---------------------------------------------------------------------------

class TestScoringConservation:
    def test_ten_thousand_instrumented_games(self, recovery_setup):
        """Every game's score equals the sum of outcome_points over its
        sampled outcomes, exactly, for 10k games."""
        model = recovery_setup["generator"].truth
        points = np.asarray(cv.OUTCOME_POINTS)
        q_a = cv.forward(model, range(5), range(5, 10))
        q_b = cv.forward(model, range(5, 10), range(5))
        from courtvec.simulation import _cdf, _play_game
        from courtvec.validation import derived_rng

        cdf_a, cdf_b = _cdf(q_a), _cdf(q_b)
        for game in range(10_000):
            result = _play_game(cdf_a, cdf_b, 100, derived_rng(123, game), record=True)
            assert result.points_a == int(points[result.outcomes_a].sum())
            assert result.points_b == int(points[result.outcomes_b].sum())
        passed("scoring-conservation (10k games)")


# ---------------------------------------------------------------------------
# criterion: analysis oracles
# ---------------------------------------------------------------------------

class TestAnalysisOracles:
    def test_pca_reconstruction_and_orthonormality(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            n = int(rng.integers(10, 60))
            d = int(rng.integers(2, 9))
            X = rng.normal(size=(n, d)) @ rng.normal(size=(d, d))
            result = cv.pca(X)
            assert np.abs(result.components @ result.components.T - np.eye(d)).max() < 1e-9
            rebuilt = result.projections @ result.components + result.means
            assert np.abs(rebuilt - X).max() < 1e-9
        passed("analysis-pca (50 random matrices)")

    def test_kmeans_exhaustive_optimum(self):
        def exhaustive(X, k):
            best = math.inf
            for assignment in itertools.product(range(k), repeat=X.shape[0]):
                if len(set(assignment)) != k:
                    continue
                labels = np.array(assignment)
                wcss = sum(
                    float(((X[labels == c] - X[labels == c].mean(axis=0)) ** 2).sum())
                    for c in range(k)
                )
                best = min(best, wcss)
            return best

        hits = 0
        for seed in range(10):
            rng = np.random.default_rng(500 + seed)
            X = rng.normal(size=(8, 2))
            result = cv.kmeans(X, 3, seed=seed)
            if abs(result.wcss - exhaustive(X, 3)) < 1e-9:
                hits += 1
        assert hits >= 9, f"global optimum hit on {hits}/10 seeds"
        passed(f"analysis-kmeans (exhaustive optimum {hits}/10 seeds)")

    def test_nearest_neighbors_brute_force_all_sizes(self):
        rng = np.random.default_rng(32)
        for v in range(2, 101):
            E = rng.normal(size=(v, 8))
            player = int(rng.integers(v))
            count = min(5, v - 1)
            expected = sorted(
                (pid for pid in range(v) if pid != player),
                key=lambda pid: (float(((E[pid] - E[player]) ** 2).sum()), pid),
            )[:count]
            assert list(cv.nearest_neighbors(E, player, count)) == expected
        passed("analysis-neighbors (v=2..100)")

    def test_pearson_and_t_match_direct_formulas(self):
        from courtvec.analysis import pearson_r

        rng = np.random.default_rng(33)
        for _ in range(50):
            n = int(rng.integers(5, 40))
            x = rng.normal(size=n)
            y = 0.4 * x + rng.normal(size=n)
            mx, my = sum(x) / n, sum(y) / n
            sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
            sxx = sum((a - mx) ** 2 for a in x)
            syy = sum((b - my) ** 2 for b in y)
            r_direct = sxy / math.sqrt(sxx * syy)
            t_direct = r_direct * math.sqrt((n - 2) / (1 - r_direct ** 2))
            r = pearson_r(x, y)
            assert abs(r - r_direct) < 1e-9
            assert abs(r * math.sqrt((n - 2) / (1 - r * r)) - t_direct) < 1e-9
        passed("analysis-pearson (direct formulas)")


# ---------------------------------------------------------------------------
# criterion: 5th-man sanity
# ---------------------------------------------------------------------------

class TestFifthManSanity:
    def test_duplicate_embeddings_tie_exactly(self, recovery_setup):
        model = recovery_setup["generator"].truth.copy()
        model.embeddings[20] = model.embeddings[21]
        query = cv.FifthManQuery(
            fixed_four=(0, 1, 2, 3), opponent=(5, 6, 7, 8, 9),
            candidates=(20, 21), sims=200, seed=41,
        )
        first, second = cv.rank_fifth_man(model, query)
        assert (first.win_pct, first.mean_margin, first.margin_std) == \
            (second.win_pct, second.mean_margin, second.margin_std)
        assert (first.candidate, second.candidate) == (20, 21)
        passed("fifth-man-ties (common random numbers)")

    def test_planted_shooter_ranks_first_over_five_seeds(self):
        """+1.0 on made-three logits: that candidate tops the table at
        sims=2000 for every one of 5 seeds."""
        generator = cv.plant_generator(
            40, embedding_dim=8, hidden_dim=16, seed=8,
            style_bias={30: {17: 1.0, 19: 1.0}}, metrics_plays=1000,
        )
        t0 = time.time()
        for seed in range(5):
            query = cv.FifthManQuery(
                fixed_four=(0, 1, 2, 3), opponent=(5, 6, 7, 8, 9),
                candidates=(29, 30, 31), sims=2000, seed=seed,
            )
            rows = cv.rank_fifth_man(generator.truth, query)
            assert rows[0].candidate == 30, (
                f"seed {seed}: expected the biased candidate first, got "
                f"{[r.candidate for r in rows]}"
            )
        passed(f"fifth-man-planted (5 seeds, {time.time() - t0:.1f}s)")


# ---------------------------------------------------------------------------
# criterion: end-to-end CLI
# ---------------------------------------------------------------------------

class TestEndToEndCli:
    ARTIFACTS = ("plays.csv", "players.csv", "val.csv", "model.cvec",
                 "report.json", "curve.csv", "analysis.json", "series.json",
                 "fifth.json")

    def run_pipeline(self, root):
        root.mkdir(exist_ok=True)
        paths = {name: str(root / name) for name in self.ARTIFACTS}
        steps = [
            ["synth", "--players", "40", "--plays", "12000", "--games", "60",
             "--seed", "6", "--h", "4", "--hidden", "8", "--pool-size", "20",
             "--uniform-mix", "0.4", "--out-plays", paths["plays.csv"],
             "--out-players", paths["players.csv"],
             "--holdout-games", "15", "--out-val", paths["val.csv"]],
            ["train", "--plays", paths["plays.csv"], "--players", paths["players.csv"],
             "--h", "4", "--hidden", "16", "--epochs", "4", "--batch", "256",
             "--lr", "1e-3", "--seed", "3", "--out", paths["model.cvec"]],
            ["eval", "--model", paths["model.cvec"], "--plays", paths["val.csv"],
             "--min-plays", "15", "--out", paths["report.json"]],
            ["eval-curve", "--model", paths["model.cvec"], "--plays", paths["val.csv"],
             "--max-n", "30", "--trials", "60", "--seed", "4", "--out", paths["curve.csv"]],
            ["analyze", "--model", paths["model.cvec"], "--players", paths["players.csv"],
             "--k", "3", "--seed", "2", "--out", paths["analysis.json"]],
            ["simulate", "--model", paths["model.cvec"], "--lineup-a", "0,1,2,3,4",
             "--lineup-b", "5,6,7,8,9", "--sims", "200", "--seed", "9",
             "--out", paths["series.json"]],
            ["optimize-fifth", "--model", paths["model.cvec"], "--fixed", "0,1,2,3",
             "--opponent", "5,6,7,8,9", "--pool", "top:4", "--plays",
             paths["plays.csv"], "--sims", "100", "--seed", "12",
             "--out", paths["fifth.json"]],
        ]
        for argv in steps:
            assert run(argv) == 0, f"step failed: {argv[0]}"
        return paths

    def test_pipeline_completes_and_reruns_byte_identical(self, tmp_path):
        first = self.run_pipeline(tmp_path / "first")
        second = self.run_pipeline(tmp_path / "second")
        for name in self.ARTIFACTS:
            a = open(first[name], "rb").read()
            b = open(second[name], "rb").read()
            assert a == b, f"{name} differs between identical runs"
        report = json.loads(open(first["report.json"]).read())
        assert report["mean_kl_bits"] < report["uniform_baseline_mean_kl_bits"]
        leftovers = [p.name for p in (tmp_path / "first").iterdir()
                     if p.name.startswith(".courtvec-tmp-")]
        assert leftovers == []
        passed("end-to-end-cli (byte-identical rerun)")
