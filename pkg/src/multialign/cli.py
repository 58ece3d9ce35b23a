"""Command-line entry point: ``multialign {predict,eval,ablate,synth,report}``.

Every command accepts ``--config FILE`` with ``key = value`` lines (keys are
the long option names, with dashes or underscores); flags on the command
line override the file.  Relative paths in the file are resolved against the
file's own directory.  Exit codes: 0 success, 1 runtime failure, 2 usage
or validation error.  Tabular output is TSV with a header row.
"""

from __future__ import annotations

import argparse
import io
import logging
import sys
import warnings
from pathlib import Path

from . import __version__
from .align_graph import RatingScale
from .corpus_io import (
    AlignmentSet,
    EditionId,
    load_alignments,
    load_corpus,
    load_gold,
    parse_pair,
    write_alignments,
)
from .evaluation import evaluate, language_ablation, stratify
from .extraction import METHODS, TIE_BREAKS, ExtractionConfig, PipelineSpec
from .nmf import NmfConfig
from .synth import SynthConfig, generate, score_recovery

log = logging.getLogger("multialign")


# config keys holding paths, resolved relative to the config file
PATH_KEYS = frozenset({
    "corpus", "alignments", "baseline", "output", "provenance", "gold",
    "per_verse", "stratify", "merged", "synth_config", "out", "hypothesis",
})


class UsageError(Exception):
    """Bad configuration; reported with exit code 2."""


def _editions(text):
    return [EditionId.parse(t) for t in text.split(",") if t.strip()]


def _ints(text):
    return [int(t) for t in text.split(",") if t.strip()]


def _fmt(x) -> str:
    return f"{x:.6g}" if isinstance(x, float) else str(x)


def read_config(path) -> dict:
    """Parse a ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, _, value = line.partition("=")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


# ---------------------------------------------------------------- options

def _add_pipeline_options(p):
    g = p.add_argument_group("pipeline")
    g.add_argument("--corpus", help="directory of <edition>.txt corpus files")
    g.add_argument("--editions", type=_editions,
                   help="comma-separated editions (default: every file in --corpus)")
    g.add_argument("--alignments", help="directory of <A>__<B>.txt initial alignment files")
    g.add_argument("--target", type=parse_pair, help="target edition pair, e.g. eng-kjv,fra-lsg")
    g.add_argument("--method", choices=METHODS, default="adad")
    g.add_argument("--baseline", help="alignment file predictions are added to "
                                      "(default: the target pair's initial alignment)")
    g.add_argument("--index-base", type=int, default=0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--r-max", type=float, default=5.0)
    g.add_argument("--r-min", type=float, default=1.0)
    g.add_argument("--rank", type=int, default=15)
    g.add_argument("--epochs", type=int, default=50)
    g.add_argument("--reg", type=float, default=0.06)
    g.add_argument("--min-score", type=float, default=None)
    g.add_argument("--tie-break", choices=TIE_BREAKS, default="lowest-index")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multialign", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)
    # lets -v follow the subcommand too without resetting a leading -v
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)

    p = sub.add_parser("predict", parents=[common], help="predict and merge new alignment edges")
    p.add_argument("--config")
    _add_pipeline_options(p)
    p.add_argument("--output", help="merged alignment file")
    p.add_argument("--provenance", help="TSV of edges added by prediction")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", parents=[common], help="score an alignment file against gold")
    p.add_argument("--config")
    p.add_argument("hypothesis", nargs="?")
    p.add_argument("gold", nargs="?")
    p.add_argument("--index-base", type=int, default=0, help="index base of the gold file")
    p.add_argument("--per-verse", help="also write per-verse scores to this TSV file")
    p.add_argument("--stratify", metavar="BASELINE",
                   help="baseline alignment file; appends the F1-stratified comparison")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", parents=[common], help="F1 against the set of auxiliary editions")
    p.add_argument("--config")
    _add_pipeline_options(p)
    p.add_argument("--gold", help="gold file for the target pair")
    p.add_argument("--pool", type=_editions, help="auxiliary editions (default: all non-target)")
    p.add_argument("--sizes", type=_ints, help="comma-separated auxiliary-set sizes")
    p.add_argument("--leave-one-in", action="store_true",
                   help="rank single auxiliary editions by F1 gain")
    p.add_argument("--allow-target-languages", action="store_true",
                   help="permit pool editions in the target pair's languages")
    p.add_argument("--output", help="write the TSV here instead of standard output")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("synth", parents=[common], help="generate a synthetic corpus with gold alignments")
    p.add_argument("--config")
    p.add_argument("--out", help="output directory")
    p.add_argument("--languages", type=int, default=4)
    p.add_argument("--verses", type=int, default=10)
    p.add_argument("--concepts", type=int, default=8)
    p.add_argument("--coverage", type=float, default=1.0)
    p.add_argument("--p-drop", type=float, default=0.0)
    p.add_argument("--p-drop-max", type=float, default=None)
    p.add_argument("--p-aux", type=float, default=0.0)
    p.add_argument("--p-noise", type=float, default=0.0)
    p.add_argument("--fertility", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("report", parents=[common], help="compare baseline and merged alignments against gold")
    p.add_argument("--config")
    p.add_argument("--gold")
    p.add_argument("--baseline")
    p.add_argument("--merged")
    p.add_argument("--index-base", type=int, default=0)
    p.add_argument("--synth-config", help="synth.cfg written by `synth`; adds recovery counts")
    p.set_defaults(func=cmd_report)
    return parser


def _apply_config(parser, argv):
    """Parse ``argv``, letting ``--config`` supply defaults that flags override."""
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    values = read_config(args.config)
    base = Path(args.config).parent
    sub = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config", "verbose")}
    defaults = {}
    for key, raw in values.items():
        action = actions.get(key)
        if action is None:
            raise UsageError(f"{args.config}: unknown key {key!r} for `{args.command}`")
        if isinstance(action, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            continue
        if key in PATH_KEYS:
            raw = str(base / raw)
        try:
            value = action.type(raw) if action.type else raw
        except (TypeError, ValueError) as exc:
            raise UsageError(f"{args.config}: bad value for {key}: {exc}") from None
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"{args.config}: {key} must be one of {list(action.choices)}")
        defaults[key] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


# ---------------------------------------------------------------- helpers

def _need(args, *names):
    for name in names:
        if getattr(args, name, None) in (None, ""):
            raise UsageError(f"missing required option --{name.replace('_', '-')}")


def _existing(path, what):
    if not Path(path).exists():
        raise UsageError(f"{what} not found: {path}")
    return Path(path)


def _writable(path):
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise UsageError(f"output directory does not exist: {parent}")
    return Path(path)


def _pair_file(directory, a, b):
    for x, y in ((a, b), (b, a)):
        path = Path(directory) / f"{x}__{y}.txt"
        if path.exists():
            return path, (x, y)
    raise UsageError(f"alignment file not found: {Path(directory) / f'{a}__{b}.txt'}")


def _load_pipeline(args) -> tuple:
    _need(args, "corpus", "alignments", "target")
    corpus_dir = _existing(args.corpus, "corpus directory")
    align_dir = _existing(args.alignments, "alignment directory")
    editions = args.editions
    if not editions:
        editions = sorted(EditionId.parse(p.stem) for p in corpus_dir.glob("*.txt"))
    target = tuple(args.target)
    for ed in target:
        if ed not in editions:
            raise UsageError(f"target edition {ed} is not among the editions")
    for ed in editions:
        _existing(corpus_dir / f"{ed}.txt", "corpus file")
    files = {}
    eds = sorted(editions)
    for i, a in enumerate(eds):
        for b in eds[i + 1:]:
            path, pair = _pair_file(align_dir, a, b)
            files[pair] = path
    if args.baseline:
        _existing(args.baseline, "baseline alignment file")
    try:
        scale = RatingScale(args.r_max, args.r_min)
        nmf = NmfConfig(rank=args.rank, epochs=args.epochs, reg=args.reg, seed=args.seed)
        extraction = ExtractionConfig(args.min_score, args.tie_break)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")

    corpus = load_corpus(corpus_dir, editions)
    initial = {
        pair: load_alignments(path, pair, corpus, args.index_base) for pair, path in files.items()
    }
    baseline = None
    if args.baseline:
        baseline = load_alignments(args.baseline, target, corpus, args.index_base)
    spec = PipelineSpec(
        corpus, initial, args.method, baseline, scale, nmf, extraction, args.seed, args.jobs
    )
    return spec, target, editions


def _write_tsv(rows, header, out):
    out.write("\t".join(header) + "\n")
    for row in rows:
        out.write("\t".join(_fmt(x) for x in row) + "\n")


def _write_text(path, text):
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)


# ---------------------------------------------------------------- commands

def cmd_predict(args) -> int:
    _need(args, "output")
    _writable(args.output)
    if args.provenance:
        _writable(args.provenance)
    spec, target, _ = _load_pipeline(args)
    merged = spec.run(target)
    write_alignments(merged, args.output)
    if args.provenance:
        buf = io.StringIO()
        rows = [
            (v, i, j, aset.edges[(i, j)] if aset.edges[(i, j)] is not None else "")
            for v, aset in sorted(merged.items())
            for i, j in sorted(aset.added)
        ]
        _write_tsv(rows, ("verse_id", "source", "target", "score"), buf)
        _write_text(args.provenance, buf.getvalue())
    n_added = sum(len(a.added) for a in merged.values())
    log.info("%d verses written to %s, %d edges added", len(merged), args.output, n_added)
    return 0


def _metric_rows(result):
    return [(k, v) for k, v in result.as_dict().items()]


def cmd_eval(args) -> int:
    _need(args, "hypothesis", "gold")
    hyp_path = _existing(args.hypothesis, "hypothesis file")
    gold_path = _existing(args.gold, "gold file")
    if args.stratify:
        _existing(args.stratify, "baseline alignment file")
    if args.per_verse:
        _writable(args.per_verse)
    pair = (EditionId("src"), EditionId("tgt"))
    gold = load_gold(gold_path, pair, index_base=args.index_base)
    hyp = load_alignments(hyp_path, pair)
    total, per_verse = evaluate(hyp, gold)
    out = sys.stdout
    _write_tsv(_metric_rows(total), ("metric", "value"), out)
    if args.per_verse:
        buf = io.StringIO()
        rows = [(v, r.precision, r.recall, r.f1, r.aer) for v, r in per_verse.items()]
        _write_tsv(rows, ("verse_id", "prec", "rec", "f1", "aer"), buf)
        _write_text(args.per_verse, buf.getvalue())
    if args.stratify:
        base = load_alignments(args.stratify, pair)
        _, base_per_verse = evaluate(base, gold)
        report = stratify(base_per_verse, per_verse)
        out.write("\n")
        _write_stratify(report, out)
    return 0


def _write_stratify(report, out):
    rows = [
        (s.label, s.n, s.baseline_f1, s.merged_f1, s.improvement) for s in report.strata
    ]
    _write_tsv(rows, ("baseline_f1_bin", "n_verses", "baseline_f1", "merged_f1", "improvement"), out)


def cmd_ablate(args) -> int:
    _need(args, "gold")
    if args.sizes is None and not args.leave_one_in:
        raise UsageError("give --sizes or --leave-one-in")
    gold_path = _existing(args.gold, "gold file")
    if args.output:
        _writable(args.output)
    spec, target, editions = _load_pipeline(args)
    pool = args.pool
    if pool is None:
        pool = [e for e in editions if e not in target]
    for ed in pool:
        if ed not in editions:
            raise UsageError(f"pool edition {ed} is not among the editions")
    if args.sizes is not None and max(args.sizes, default=0) > len(pool):
        raise UsageError(f"requested size {max(args.sizes)} exceeds the pool of {len(pool)}")
    gold = load_gold(gold_path, target, spec.corpus, args.index_base)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rows = language_ablation(
            spec, target, pool, gold,
            sizes=None if args.leave_one_in else args.sizes,
            leave_one_in=args.leave_one_in, seed=args.seed,
            allow_target_languages=args.allow_target_languages,
        )
    header = ("language", "delta_f1") if args.leave_one_in else ("n_languages", "f1")
    buf = io.StringIO()
    _write_tsv(rows, header, buf)
    if args.output:
        _write_text(args.output, buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def _synth_config(args) -> SynthConfig:
    try:
        return SynthConfig(
            n_languages=args.languages, n_verses=args.verses, concepts=args.concepts,
            coverage=args.coverage, p_drop=args.p_drop, p_aux=args.p_aux,
            p_noise=args.p_noise, fertility=args.fertility, p_drop_max=args.p_drop_max,
            seed=args.seed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_synth(args) -> int:
    _need(args, "out")
    config = _synth_config(args)
    inst = generate(config)
    out = Path(args.out)
    paths = inst.write(out)
    a, b = inst.target
    lines = [
        "# written by `multialign synth`",
        f"corpus = {paths['corpus'].relative_to(out)}",
        f"editions = {','.join(str(e) for e in config.editions)}",
        f"alignments = {paths['alignments'].relative_to(out)}",
        f"target = {a},{b}",
        f"seed = {config.seed}",
    ]
    _write_text(out / "predict.cfg", "\n".join(lines) + "\n")
    synth_lines = [
        f"languages = {config.n_languages}", f"verses = {config.n_verses}",
        f"concepts = {config.concepts}", f"coverage = {config.coverage!r}",
        f"p_drop = {config.p_drop!r}", f"p_aux = {config.p_aux!r}",
        f"p_noise = {config.p_noise!r}", f"fertility = {config.fertility}",
        f"seed = {config.seed}",
    ]
    if config.p_drop_max is not None:
        synth_lines.append(f"p_drop_max = {config.p_drop_max!r}")
    _write_text(out / "synth.cfg", "\n".join(synth_lines) + "\n")
    log.info("synthetic corpus of %d verses written to %s", config.n_verses, out)
    return 0


def cmd_report(args) -> int:
    _need(args, "gold", "baseline", "merged")
    gold_path = _existing(args.gold, "gold file")
    base_path = _existing(args.baseline, "baseline alignment file")
    merged_path = _existing(args.merged, "merged alignment file")
    if args.synth_config:
        _existing(args.synth_config, "synth config")
    pair = (EditionId("src"), EditionId("tgt"))
    gold = load_gold(gold_path, pair, index_base=args.index_base)
    base = load_alignments(base_path, pair)
    merged = load_alignments(merged_path, pair)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        b_total, b_verse = evaluate(base, gold)
        m_total, m_verse = evaluate(merged, gold)
    out = sys.stdout
    rows = []
    for key, bv in b_total.as_dict().items():
        mv = m_total.as_dict()[key]
        rows.append((key, bv, mv, mv - bv))
    _write_tsv(rows, ("metric", "baseline", "merged", "delta"), out)
    out.write("\n")
    _write_stratify(stratify(b_verse, m_verse), out)
    if args.synth_config:
        sargs = _apply_config(build_parser(), ["synth", "--config", args.synth_config, "--out", "."])
        inst = generate(_synth_config(sargs))
        target = inst.target
        merged_t = {v: AlignmentSet(v, target, s.edges) for v, s in merged.items()}
        out.write("\n")
        _write_tsv(score_recovery(inst, merged_t).rows(), ("metric", "value"), out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except UsageError as exc:
        print(f"multialign: error: {exc}", file=sys.stderr)
        return 2
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"multialign: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, ArithmeticError, AssertionError) as exc:
        print(f"multialign: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
