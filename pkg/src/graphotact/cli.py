"""Command-line surface: align, train, hallucinate, eval, sample.

Exit codes: 0 success, 1 usage, 2 data error, 3 numeric fault. Every
randomized subcommand takes a mandatory --seed and is byte-for-byte
reproducible: same flags and seed, same output files.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import align, corpus, gan, halluc, metrics
from .errors import DataError, MissingModelError, NumericFault

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

METHODS = ("random", "trigram", "gan")


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors by default; the contract says 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_config(path: str) -> dict[str, str]:
    """Line-based key=value file; blank lines and # comments allowed."""
    pairs: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep or not key.strip():
            raise DataError(f"{path}:{line_no}: expected key=value, got {line!r}")
        pairs[key.strip()] = value.strip()
    return pairs


def _apply_config(args: argparse.Namespace, keys: dict) -> None:
    """Fill unset flags from the config file, then from built-in defaults.

    Flags always win: only None-valued attributes are touched.
    """
    pairs = _read_config(args.config) if getattr(args, "config", None) else {}
    for raw_key, raw_value in pairs.items():
        key = raw_key.replace("-", "_")
        if key not in keys:
            log.warning("config: unknown key %r ignored", raw_key)
            continue
        if getattr(args, key) is None:
            cast = keys[key][0]
            try:
                setattr(args, key, cast(raw_value))
            except ValueError as exc:
                raise DataError(
                    f"config: bad value for {raw_key}: {raw_value!r}"
                ) from exc
    for key, (_cast, default) in keys.items():
        if getattr(args, key) is None:
            setattr(args, key, default)


def _load(args: argparse.Namespace) -> corpus.Dataset:
    return corpus.load_dataset(args.input, language=args.language)


def _write_lines(path: str | None, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n" if lines else ""
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _make_generator(args: argparse.Namespace, ds: corpus.Dataset):
    """The stem generator selected by --method, ready to propose."""
    if args.method == "gan":
        if not args.checkpoint:
            raise MissingModelError(
                "method gan needs --checkpoint pointing at a trained model"
            )
        model = gan.load_model(args.checkpoint)
        data_alphabet = corpus.build_alphabet(ds)
        if model.alphabet.symbols != data_alphabet.symbols:
            log.warning(
                "checkpoint alphabet differs from the dataset's; "
                "proposals follow the checkpoint"
            )
        return halluc.GanStemGenerator(model)
    alphabet = corpus.build_alphabet(ds)
    if args.method == "random":
        return halluc.RandomStemGenerator(alphabet)
    stems = align.training_stems(ds)
    model = halluc.trigram_fit(stems, smoothing=args.smoothing,
                               vocab=alphabet.real_symbols)
    return halluc.TrigramStemGenerator(model)


def cmd_align(args: argparse.Namespace) -> None:
    ds = _load(args)
    rows = list(align.alignment_rows(ds))
    _write_lines(args.output, ["\t".join(row) for row in rows])
    print(f"aligned {len(rows)} of {len(ds)} rows -> {args.output}")


def cmd_train(args: argparse.Namespace) -> None:
    _apply_config(args, {
        "epochs": (int, 500),
        "batch_size": (int, 32),
        "lr_g": (float, 1e-3),
        "lr_d": (float, 1e-3),
        "hidden": (int, gan.DEFAULT_HIDDEN),
        "sample_every": (int, 100),
    })
    ds = _load(args)
    stems = align.training_stems(ds)
    alphabet = corpus.build_alphabet(ds)
    cfg = gan.TrainConfig(epochs=args.epochs, batch_size=args.batch_size,
                          lr_g=args.lr_g, lr_d=args.lr_d, seed=args.seed,
                          sample_every=args.sample_every)
    model, history = gan.train(stems, alphabet, cfg, hidden_size=args.hidden)
    gan.save_model(args.output, model)
    loss_csv = args.loss_csv or f"{args.output}.loss.csv"
    sample_log = args.sample_log or f"{args.output}.samples.txt"
    history.write_csv(loss_csv)
    history.write_samples(sample_log)
    regime = gan.classify_regime(history) if len(history) >= 100 else "n/a"
    print(f"steps={len(history)} stems={len(stems)} vocab={len(alphabet)} "
          f"regime={regime}")
    print(f"final d_loss={history.d_loss[-1]!r} g_loss={history.g_loss[-1]!r}")
    print(f"wrote {args.output}, {loss_csv}, {sample_log}")


def cmd_hallucinate(args: argparse.Namespace) -> None:
    _apply_config(args, {
        "n": (int, 10000),
        "smoothing": (float, 0.1),
    })
    if args.n < 1:
        raise DataError("n must be >= 1")
    ds = _load(args)
    generator = _make_generator(args, ds)
    rng = np.random.default_rng(args.seed)
    out = halluc.hallucinate(ds, generator, args.n, rng=rng)
    provenance = generator.method if args.provenance else None
    corpus.write_dataset(out, args.output, provenance=provenance)
    print(f"hallucinated {len(out)} triples via {generator.method} -> {args.output}")


def cmd_eval(args: argparse.Namespace) -> None:
    preds = Path(args.predictions).read_text("utf-8").splitlines()
    golds = Path(args.references).read_text("utf-8").splitlines()
    report = metrics.evaluate(preds, golds)
    print(f"evaluated {report.count} pairs")
    print(f"  accuracy         {report.accuracy:.4f}")
    print(f"  avg_levenshtein  {report.avg_levenshtein:.4f}")
    print(f"accuracy={report.accuracy!r}")
    print(f"avg_levenshtein={report.avg_levenshtein!r}")
    print(f"count={report.count}")


def cmd_sample(args: argparse.Namespace) -> None:
    _apply_config(args, {
        "n": (int, 100),
        "smoothing": (float, 0.1),
        "length": (int, None),
    })
    if args.n < 0:
        raise DataError("n must be >= 0")
    rng = np.random.default_rng(args.seed)
    if args.raw:
        if args.method != "gan":
            args.parser.error("--raw applies only to --method gan")
        if not args.checkpoint:
            raise MissingModelError(
                "method gan needs --checkpoint pointing at a trained model"
            )
        model = gan.load_model(args.checkpoint)
        _write_lines(args.output, gan.sample_raw(model, args.n, rng))
        return
    if not args.input:
        args.parser.error("-i/--input is required unless sampling --raw")
    ds = _load(args)
    generator = _make_generator(args, ds)
    if args.length is not None:
        lengths = [args.length] * args.n
    else:
        stems = align.training_stems(ds)
        if not stems:
            raise DataError("no alignable stems to draw lengths from; use --length")
        lengths = [len(stems[int(rng.integers(0, len(stems)))])
                   for _ in range(args.n)]
    _write_lines(args.output, [generator.propose(n, rng) for n in lengths])


def build_parser() -> _Parser:
    parser = _Parser(prog="graphotact",
                     description="Learn a language's graphotactics from 100 "
                                 "inflection examples and hallucinate "
                                 "artificial training triples.")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log progress details to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("align", parents=[], help="factor lemma/form pairs "
                       "into prefix/stem/suffix and write a 6-column TSV")
    p.add_argument("-i", "--input", required=True, help="train-low TSV")
    p.add_argument("-o", "--output", required=True, help="decomposition TSV")
    p.add_argument("--language", help="language id (default: input file stem)")
    p.set_defaults(func=cmd_align, parser=p)

    p = sub.add_parser("train", help="train the adversarial stem generator")
    p.add_argument("-i", "--input", required=True, help="train-low TSV")
    p.add_argument("-o", "--output", required=True, help="checkpoint path")
    p.add_argument("--language", help="language id (default: input file stem)")
    p.add_argument("--seed", type=int, required=True, help="master RNG seed")
    p.add_argument("--epochs", type=int, help="training epochs (default 500)")
    p.add_argument("--batch-size", type=int, dest="batch_size",
                   help="examples per step (default 32)")
    p.add_argument("--lr-g", type=float, dest="lr_g",
                   help="generator learning rate (default 1e-3)")
    p.add_argument("--lr-d", type=float, dest="lr_d",
                   help="discriminator learning rate (default 1e-3)")
    p.add_argument("--hidden", type=int, help="recurrent units (default 100)")
    p.add_argument("--sample-every", type=int, dest="sample_every",
                   help="steps between logged samples (default 100)")
    p.add_argument("--loss-csv", help="loss history path "
                   "(default: <checkpoint>.loss.csv)")
    p.add_argument("--sample-log", help="sample log path "
                   "(default: <checkpoint>.samples.txt)")
    p.add_argument("--config", help="key=value file for unset flags")
    p.set_defaults(func=cmd_train, parser=p)

    p = sub.add_parser("hallucinate", help="emit artificial inflection triples")
    p.add_argument("-i", "--input", required=True, help="train-low TSV")
    p.add_argument("-o", "--output", required=True, help="augmented TSV")
    p.add_argument("--language", help="language id (default: input file stem)")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--seed", type=int, required=True, help="master RNG seed")
    p.add_argument("-n", type=int, help="triples to emit (default 10000)")
    p.add_argument("--checkpoint", help="trained model (required for gan)")
    p.add_argument("--smoothing", type=float,
                   help="trigram add-k constant (default 0.1)")
    p.add_argument("--provenance", action="store_true",
                   help="append a 4th column naming the method")
    p.add_argument("--config", help="key=value file for unset flags")
    p.set_defaults(func=cmd_hallucinate, parser=p)

    p = sub.add_parser("eval", help="score predictions against references")
    p.add_argument("-p", "--predictions", required=True,
                   help="one prediction per line")
    p.add_argument("-r", "--references", required=True,
                   help="one reference per line, aligned with predictions")
    p.set_defaults(func=cmd_eval, parser=p)

    p = sub.add_parser("sample", help="draw stems from a generator")
    p.add_argument("-i", "--input", help="train-low TSV (alphabet and lengths)")
    p.add_argument("-o", "--output", help="write here instead of stdout")
    p.add_argument("--language", help="language id (default: input file stem)")
    p.add_argument("--method", required=True, choices=METHODS)
    p.add_argument("--seed", type=int, required=True, help="master RNG seed")
    p.add_argument("-n", type=int, help="stems to draw (default 100)")
    p.add_argument("--length", type=int,
                   help="stem length (default: drawn from training stems)")
    p.add_argument("--raw", action="store_true",
                   help="uncleaned 10-glyph model output (gan only)")
    p.add_argument("--checkpoint", help="trained model (required for gan)")
    p.add_argument("--smoothing", type=float,
                   help="trigram add-k constant (default 0.1)")
    p.add_argument("--config", help="key=value file for unset flags")
    p.set_defaults(func=cmd_sample, parser=p)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args.func(args)
    except NumericFault as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
