"""courtvec command-line tool.

Subcommands: ingest, synth, train, eval, eval-curve, analyze, neighbors,
simulate, optimize-fifth, serve, version. Exit codes: 0 success, 1 usage
error, 2 data error, 3 runtime error. Flags may be collected in a file
and supplied as @file. Every output file is written atomically
(temp + rename), and every command is deterministic given its flags:
seeds are always flags, never wall clock.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

import numpy as np

from . import __version__
from .analysis import elbow_curve, kmeans, metric_correlations, nearest_neighbors, pca, standardize
from .checkpoint import load_checkpoint, save_checkpoint
from .errors import ArgumentError, CourtVecError, DataError, RuntimeFailure
from .evaluation import kl_vs_plays_curve, uniform_baseline, validate_matchups
from .fifth_man import FifthManQuery, rank_fifth_man
from .network import ModelConfig, init_model
from .plays import chronological_split, normalize_plays, parse_plays, write_plays
from .registry import build_registry, write_registry
from .rules import RawEvent, default_mapping, parse_rules
from .simulation import most_frequent_players, simulate_series
from .synth import generate_plays, plant_generator
from .training import TrainConfig, train

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the CLI contract says 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def write_atomic(path: str, data: str | bytes) -> None:
    """Write via temp file + rename so interrupted runs never leave a
    truncated artifact."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".courtvec-tmp-")
    try:
        if isinstance(data, bytes):
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
        else:
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _parse_id_list(text: str, expected: int | None = None):
    try:
        ids = [int(p) for p in text.replace(";", ",").split(",") if p.strip() != ""]
    except ValueError:
        raise ArgumentError(f"not a comma-separated id list: {text!r}") from None
    if expected is not None and len(ids) != expected:
        raise ArgumentError(f"expected {expected} ids, got {len(ids)} in {text!r}")
    return ids


def build_parser() -> _Parser:
    parser = _Parser(prog="courtvec", fromfile_prefix_chars="@",
                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("ingest", parents=[], help="normalize play and player files")
    p.add_argument("--plays", required=True)
    p.add_argument("--players", required=True)
    p.add_argument("--rules", default=None, help="outcome-mapping rules file")
    p.add_argument("--out", required=True, help="normalized play CSV")
    p.add_argument("--holdout-games", type=int, default=0)
    p.add_argument("--out-val", default=None,
                   help="write the last --holdout-games games here instead of --out")

    p = sub.add_parser("synth", help="generate a planted synthetic corpus")
    p.add_argument("--players", type=int, required=True)
    p.add_argument("--plays", type=int, required=True)
    p.add_argument("--games", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--h", type=int, default=8, dest="embedding_dim")
    p.add_argument("--hidden", type=int, default=32)
    p.add_argument("--lineup-sampling", choices=["uniform", "zipf"], default="zipf")
    p.add_argument("--pool-size", type=int, default=150)
    p.add_argument("--zipf-exponent", type=float, default=1.0)
    p.add_argument("--uniform-mix", type=float, default=0.5)
    p.add_argument("--out-plays", required=True)
    p.add_argument("--out-players", required=True)
    p.add_argument("--holdout-games", type=int, default=0)
    p.add_argument("--out-val", default=None)

    p = sub.add_parser("train", help="train a model on a play file")
    p.add_argument("--plays", required=True)
    p.add_argument("--players", required=True)
    p.add_argument("--h", type=int, default=8, dest="embedding_dim")
    p.add_argument("--hidden", type=int, default=128)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--batch", type=int, default=512)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--optimizer", choices=["adam", "sgd"], default="adam")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="checkpoint path")

    p = sub.add_parser("eval", help="per-matchup K-L report on validation plays")
    p.add_argument("--model", required=True)
    p.add_argument("--plays", required=True)
    p.add_argument("--min-plays", type=int, default=15)
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval-curve", help="K-L vs plays-per-empirical-distribution curve")
    p.add_argument("--model", required=True)
    p.add_argument("--plays", required=True)
    p.add_argument("--max-n", type=int, default=60)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="CSV of n,mean_kl rows")

    p = sub.add_parser("analyze", help="embedding-space analysis report")
    p.add_argument("--model", required=True)
    p.add_argument("--players", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--elbow-max-k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=5e-4)
    p.add_argument("--out", required=True)
    p.add_argument("--elbow-csv", default=None,
                   help="also write the elbow table as k,wcss rows")
    p.add_argument("--scatter-csv", default=None,
                   help="also write per-player PCA scores + cluster as CSV")

    p = sub.add_parser("neighbors", help="nearest players in embedding space")
    p.add_argument("--model", required=True)
    p.add_argument("--player", required=True, help="player id, or name with --players")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--players", default=None)

    p = sub.add_parser("simulate", help="Monte Carlo best-of-7 series")
    p.add_argument("--model", required=True)
    p.add_argument("--lineup-a", required=True,
                   help="5 comma-separated ids, or top:K for the K-th most "
                        "frequent lineup mined from --plays")
    p.add_argument("--lineup-b", required=True)
    p.add_argument("--plays", default=None, help="play file for top:K lineups")
    p.add_argument("--sims", type=int, default=1000)
    p.add_argument("--possessions", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--names", action="store_true", help="print player names (needs --players)")
    p.add_argument("--players", default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("optimize-fifth", help="rank candidate fifth players")
    p.add_argument("--model", required=True)
    p.add_argument("--fixed", required=True, help="4 comma-separated ids")
    p.add_argument("--opponent", required=True, help="5 comma-separated ids")
    p.add_argument("--pool", required=True,
                   help="candidate ids file, inline id list, or top:N (needs --plays)")
    p.add_argument("--plays", default=None, help="play file for top:N pools")
    p.add_argument("--sims", type=int, default=1000)
    p.add_argument("--possessions", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None)

    p = sub.add_parser("serve", help="run the read-only inference service")
    p.add_argument("--model", required=True)
    p.add_argument("--players", required=True)
    p.add_argument("--bind", default="127.0.0.1:8000")

    sub.add_parser("version", help="print build metadata")
    return parser


def _load_model_and_registry(model_path, players_path):
    model = load_checkpoint(model_path)
    registry = build_registry(players_path)
    if len(registry) != model.config.n_players:
        raise DataError(
            f"registry has {len(registry)} players but the checkpoint expects "
            f"{model.config.n_players}"
        )
    return model, registry


def _cmd_ingest(args) -> int:
    registry = build_registry(args.players)
    mapping = parse_rules(args.rules) if args.rules else default_mapping()
    plays, dropped = _read_plays_maybe_raw(args.plays, registry, mapping)
    plays = normalize_plays(plays)
    train_part, val_part = chronological_split(plays, args.holdout_games)
    if args.holdout_games and args.out_val:
        _write_plays_atomic(train_part, args.out)
        _write_plays_atomic(val_part, args.out_val)
    else:
        _write_plays_atomic(plays, args.out)
    print(f"ingested {len(plays)} plays ({dropped} non-possession rows dropped)")
    if args.holdout_games and args.out_val:
        print(f"train: {len(train_part)} plays -> {args.out}")
        print(f"validation: {len(val_part)} plays ({args.holdout_games} games) -> {args.out_val}")
    return EXIT_OK


def _read_plays_maybe_raw(path, registry, mapping):
    """Normalized play CSVs pass straight through; raw feeds with a
    description column are mapped through the rule set, with drop rows
    counted."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    header = text.splitlines()[0].strip() if text else ""
    if header == "game_id,seq,offense,defense,outcome":
        return parse_plays(text, registry), 0
    return parse_raw_plays(text, registry, mapping)


def parse_raw_plays(source, registry, mapping):
    """Parse a raw feed: game_id,seq,offense,defense,description,made,
    ft_made,ft_attempted. Returns (plays, dropped_count)."""
    from .errors import ParseError
    from .plays import Play, _parse_lineup

    if isinstance(source, str) and "\n" in source:
        text = source
    else:
        with open(source, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    expected = ["game_id", "seq", "offense", "defense", "description", "made",
                "ft_made", "ft_attempted"]
    if header is None or [h.strip() for h in header] != expected:
        raise ParseError(f"bad raw play header {header!r}, expected {expected!r}", line=1)
    plays, dropped = [], 0
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != len(expected):
            raise ParseError(f"expected {len(expected)} fields, got {len(row)}", line=lineno)
        made_token = row[5].strip().lower()
        made = {"made": True, "missed": False, "": None, "-": None}.get(made_token, None)
        event = RawEvent(
            description=row[4],
            made=made,
            ft_made=int(row[6] or 0),
            ft_attempted=int(row[7] or 0),
        )
        if mapping.should_drop(event):
            dropped += 1
            continue
        outcome = mapping.map(event)
        plays.append(
            Play(
                game_id=row[0],
                seq=int(row[1]),
                offense=_parse_lineup(row[2], lineno, "offense"),
                defense=_parse_lineup(row[3], lineno, "defense"),
                outcome=outcome,
            )
        )
    for play in plays:
        for pid in play.offense + play.defense:
            registry.get(pid)
    return plays, dropped


def _write_plays_atomic(plays, path):
    buf = io.StringIO()
    write_plays(plays, buf)
    write_atomic(path, buf.getvalue())


def _cmd_synth(args) -> int:
    gen = plant_generator(
        n_players=args.players,
        embedding_dim=args.embedding_dim,
        hidden_dim=args.hidden,
        seed=args.seed,
        lineup_sampling=args.lineup_sampling,
        pool_size=args.pool_size,
        zipf_exponent=args.zipf_exponent,
        uniform_mix=args.uniform_mix,
    )
    plays = generate_plays(gen, args.plays, args.games)
    buf = io.StringIO()
    write_registry(gen.roster, buf)
    write_atomic(args.out_players, buf.getvalue())
    if args.holdout_games and args.out_val:
        train_part, val_part = chronological_split(plays, args.holdout_games)
        _write_plays_atomic(train_part, args.out_plays)
        _write_plays_atomic(val_part, args.out_val)
        print(f"synthesized {len(plays)} plays: {len(train_part)} train, "
              f"{len(val_part)} validation ({args.holdout_games} games)")
    else:
        _write_plays_atomic(plays, args.out_plays)
        print(f"synthesized {len(plays)} plays over {args.games} games")
    return EXIT_OK


def _cmd_train(args) -> int:
    registry = build_registry(args.players)
    plays = parse_plays(args.plays, registry)
    config = ModelConfig(
        n_players=len(registry),
        embedding_dim=args.embedding_dim,
        hidden_dim=args.hidden,
    )
    model = init_model(config, args.seed)
    cfg = TrainConfig(
        learning_rate=args.lr, batch_size=args.batch, epochs=args.epochs,
        optimizer=args.optimizer, seed=args.seed,
    )
    train(model, plays, cfg,
          report=lambda epoch, loss: print(f"epoch {epoch}: loss {loss:.6f}"))
    buf = io.BytesIO()
    save_checkpoint(model, buf)
    write_atomic(args.out, buf.getvalue())
    print(f"saved {args.out}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    model = load_checkpoint(args.model)
    plays = parse_plays(args.plays)
    report = validate_matchups(model, plays, min_plays=args.min_plays)
    baseline = uniform_baseline(plays, min_plays=args.min_plays)
    body = report.to_dict()
    body["uniform_baseline_mean_kl_bits"] = baseline
    write_atomic(args.out, _json_dumps(body))
    if report.empty:
        print("no matchup clears the play-count filter")
    else:
        std = f" +/- {report.std_kl:.4f}" if report.std_kl is not None else ""
        print(
            f"{len(report.results)} matchups: mean K-L {report.mean_kl:.4f}{std} bits "
            f"(uniform baseline {baseline:.4f})"
        )
    return EXIT_OK


def _cmd_eval_curve(args) -> int:
    model = load_checkpoint(args.model)
    plays = parse_plays(args.plays)
    curve = kl_vs_plays_curve(model, plays, max_n=args.max_n, trials=args.trials,
                              seed=args.seed)
    lines = ["n,mean_kl"] + [f"{n},{value!r}" for n, value in curve]
    write_atomic(args.out, "\n".join(lines) + "\n")
    print(f"wrote {len(curve)} curve points to {args.out}")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    model, registry = _load_model_and_registry(args.model, args.players)
    scaled = standardize(model.embeddings)
    decomposition = pca(scaled.X)
    clusters = kmeans(scaled.X, args.k, seed=args.seed)
    max_k = min(args.elbow_max_k, len(registry))
    elbow = elbow_curve(scaled.X, range(1, max_k + 1), seed=args.seed)
    correlations = metric_correlations(decomposition.projections[:, :2], registry,
                                       alpha=args.alpha)
    body = {
        "players": len(registry),
        "embedding_dim": model.config.embedding_dim,
        "preprocessing": "embeddings standardized per dimension before PCA and k-means",
        "standardized": scaled.X.tolist(),
        "pca": {
            "components": decomposition.components.tolist(),
            "explained_variance": decomposition.explained_variance.tolist(),
            "projections": decomposition.projections.tolist(),
        },
        "kmeans": {
            "k": clusters.k,
            "wcss": clusters.wcss,
            "assignment": clusters.assignment.tolist(),
            "centroids": clusters.centroids.tolist(),
        },
        "elbow": [{"k": k, "wcss": w} for k, w in elbow],
        "correlations": [
            {
                "metric": row.metric,
                "dimension": row.dimension,
                "r": row.r,
                "t": row.t,
                "p": row.p,
                "significant": row.significant,
            }
            for row in correlations
        ],
        "alpha": args.alpha,
    }
    write_atomic(args.out, _json_dumps(body))
    if args.elbow_csv:
        lines = ["k,wcss"] + [f"{k},{w!r}" for k, w in elbow]
        write_atomic(args.elbow_csv, "\n".join(lines) + "\n")
    if args.scatter_csv:
        lines = ["player_id,name,position,dim1,dim2,cluster"]
        for record in registry:
            pid = record.player_id
            lines.append(
                f"{pid},{record.name},{record.position},"
                f"{decomposition.projections[pid, 0]!r},"
                f"{decomposition.projections[pid, 1]!r},{clusters.assignment[pid]}"
            )
        write_atomic(args.scatter_csv, "\n".join(lines) + "\n")
    print(f"analysis written to {args.out} (k={args.k}, wcss={clusters.wcss:.4f})")
    return EXIT_OK


def _cmd_neighbors(args) -> int:
    model = load_checkpoint(args.model)
    registry = build_registry(args.players) if args.players else None
    if registry is not None:
        player = registry.resolve(args.player)
    else:
        if not args.player.lstrip("-").isdigit():
            raise ArgumentError("--player is a name; pass --players to resolve names")
        player = int(args.player)
    ids = nearest_neighbors(model.embeddings, player, args.count)
    anchor = model.embeddings[player]
    for pid in ids:
        distance = float(np.linalg.norm(model.embeddings[int(pid)] - anchor))
        if registry is not None:
            rec = registry.get(int(pid))
            print(f"{pid}\t{rec.name}\t{rec.position}\t{distance:.6f}")
        else:
            print(f"{pid}\t{distance:.6f}")
    return EXIT_OK


def _resolve_cli_lineup(spec: str, args, mined: dict) -> list:
    """A lineup flag is either five ids or `top:K`, the K-th most
    frequent lineup in --plays (offense + defense occurrences)."""
    if not spec.startswith("top:"):
        return _parse_id_list(spec, expected=5)
    if not args.plays:
        raise ArgumentError("top:K lineups need --plays to mine frequencies")
    if "ranked" not in mined:
        from .simulation import most_frequent_lineups

        mined["ranked"] = most_frequent_lineups(parse_plays(args.plays))
    rank = int(spec.split(":", 1)[1])
    ranked = mined["ranked"]
    if not 1 <= rank <= len(ranked):
        raise ArgumentError(f"top:{rank} out of range; only {len(ranked)} lineups seen")
    return list(ranked[rank - 1][0])


def _cmd_simulate(args) -> int:
    model = load_checkpoint(args.model)
    mined: dict = {}
    lineup_a = _resolve_cli_lineup(args.lineup_a, args, mined)
    lineup_b = _resolve_cli_lineup(args.lineup_b, args, mined)
    result = simulate_series(
        model, lineup_a, lineup_b,
        sims=args.sims, possessions=args.possessions, seed=args.seed,
    )
    body = {
        "lineup_a": sorted(lineup_a),
        "lineup_b": sorted(lineup_b),
        "seed": args.seed,
        **result.to_dict(),
    }
    if args.names:
        if not args.players:
            raise ArgumentError("--names needs --players to resolve ids")
        registry = build_registry(args.players)
        body["names_a"] = [registry.get(p).name for p in sorted(lineup_a)]
        body["names_b"] = [registry.get(p).name for p in sorted(lineup_b)]
    if args.out:
        write_atomic(args.out, _json_dumps(body))
    wins_a, wins_b = result.mean_series_score
    print(
        f"series {wins_a:.2f} vs {wins_b:.2f} | margin {result.mean_margin:+.2f} "
        f"+/- {result.margin_std:.2f} | team A game win "
        f"{100.0 * result.game_win_fraction_a:.1f}%"
    )
    return EXIT_OK


def _resolve_pool(args, placed):
    spec = args.pool
    if spec.startswith("top:"):
        if not args.plays:
            raise ArgumentError("--pool top:N needs --plays to rank players by appearances")
        n = int(spec.split(":", 1)[1])
        plays = parse_plays(args.plays)
        ranked = most_frequent_players(plays, count=None)
        pool = [pid for pid in ranked if pid not in placed][:n]
    elif os.path.exists(spec):
        with open(spec, "r", encoding="utf-8") as fh:
            pool = _parse_id_list(",".join(fh.read().split()))
        pool = [pid for pid in pool if pid not in placed]
    else:
        pool = [pid for pid in _parse_id_list(spec) if pid not in placed]
    if not pool:
        raise ArgumentError(f"candidate pool {spec!r} is empty after removing placed players")
    return pool


def _cmd_optimize_fifth(args) -> int:
    model = load_checkpoint(args.model)
    fixed = _parse_id_list(args.fixed, expected=4)
    opponent = _parse_id_list(args.opponent, expected=5)
    pool = _resolve_pool(args, set(fixed) | set(opponent))
    query = FifthManQuery(
        fixed_four=tuple(fixed), opponent=tuple(opponent), candidates=tuple(pool),
        sims=args.sims, possessions=args.possessions, seed=args.seed,
    )
    rows = rank_fifth_man(model, query, threads=max(1, args.threads))
    body = {
        "fixed_four": sorted(fixed),
        "opponent": sorted(opponent),
        "seed": args.seed,
        "sims": args.sims,
        "rows": [row.to_dict() for row in rows],
    }
    if args.out:
        write_atomic(args.out, _json_dumps(body))
    for row in rows:
        print(
            f"{row.candidate}\twin {row.win_pct:.1f}%\tmargin {row.mean_margin:+.2f} "
            f"+/- {row.margin_std:.2f}"
        )
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .checkpoint import checkpoint_sha256
    from .service import create_app

    model, registry = _load_model_and_registry(args.model, args.players)
    host, _, port = args.bind.rpartition(":")
    app = create_app(model, registry, checkpoint_hash=checkpoint_sha256(model))
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return EXIT_OK


def _cmd_version(args) -> int:
    print(f"courtvec {__version__} (python {sys.version.split()[0]}, numpy {np.__version__})")
    return EXIT_OK


_COMMANDS = {
    "ingest": _cmd_ingest,
    "synth": _cmd_synth,
    "train": _cmd_train,
    "eval": _cmd_eval,
    "eval-curve": _cmd_eval_curve,
    "analyze": _cmd_analyze,
    "neighbors": _cmd_neighbors,
    "simulate": _cmd_simulate,
    "optimize-fifth": _cmd_optimize_fifth,
    "serve": _cmd_serve,
    "version": _cmd_version,
}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    handler = _COMMANDS[args.command]
    try:
        return handler(args)
    except (DataError, ArgumentError) as exc:
        print(f"courtvec {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except RuntimeFailure as exc:
        print(f"courtvec {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except FileNotFoundError as exc:
        print(f"courtvec {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CourtVecError as exc:
        print(f"courtvec {args.command}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
