"""Command-line surface: `kbwalk index | query | eval`.

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .bridging import make_bridge_query  # noqa: F401  (re-exported for scripts)
from .errors import KbwalkError
from .kb_core import IngestConfig, build_node_groups, ingest_corpus, load_index, save_index
from .metrics import AlignmentInput, alignment_score, diversity_report
from .pipeline import (ConversationInput, PipelineConfig, ProviderSet,
                       config_from_toml, read_conversations, result_records,
                       run_pipeline)

log = logging.getLogger("kbwalk")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def load_config(path: str | None) -> PipelineConfig:
    path = path or os.environ.get("KBWALK_CONFIG")
    if not path:
        return PipelineConfig()
    with open(path, encoding="utf-8") as fh:
        return config_from_toml(fh.read())


def cmd_index(args) -> int:
    config = load_config(args.config)
    if args.cluster_threshold is not None:
        config.bridging.cluster_threshold = args.cluster_threshold
    providers = ProviderSet(config.providers, seed=config.seed)
    index = ingest_corpus(args.corpus, IngestConfig(max_rows=args.max_rows))
    build_node_groups(index, providers.embedder, config.bridging.cluster_threshold)
    save_index(index, args.out)
    print(f"indexed {len(index.sentences)} sentences, "
          f"{len(index.concepts)} concepts, {len(index.groups)} groups "
          f"({index.stats.skipped} rows skipped)")
    return 0


def cmd_query(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
        config.search.seed = args.seed
    if args.simulations is not None:
        config.search.simulations = args.simulations
    providers = ProviderSet(config.providers, seed=config.seed)
    index = load_index(args.index)
    conversations = read_conversations(args.conversation)
    failures = 0
    with open(args.out, "w", encoding="utf-8") as out:
        for conv in conversations:
            try:
                results = run_pipeline(conv, index, config, providers)
            except KbwalkError as exc:
                failures += 1
                log.error("conversation %s failed: %s", conv.id, exc)
                continue
            for rec in result_records(conv, results, index):
                out.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")
    print(f"processed {len(conversations)} conversations "
          f"({failures} failed) -> {args.out}")
    return 0 if failures < len(conversations) else 2


def _read_texts(path) -> list[str]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(json.loads(line)["text"])
    return out


def cmd_eval(args) -> int:
    config = load_config(args.config)
    providers = ProviderSet(config.providers, seed=config.seed)
    knowledge = []
    with open(args.results, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rec = json.loads(line)
                knowledge.extend(item["text"] for item in rec["knowledge"])
    if not knowledge:
        print("error: no knowledge in results file", file=sys.stderr)
        return 2
    report = diversity_report(knowledge[: args.max_sentences], providers.embedder)
    lines = [
        "pairwise diversity (lower overlap = more diverse)",
        f"  rouge1 f1    {report.rouge1_f1:.4f}",
        f"  rouge2 f1    {report.rouge2_f1:.4f}",
        f"  rougeL f1    {report.rougeL_f1:.4f}",
        f"  semantic f1  {report.semantic_f1:.4f}   (P {report.semantic_precision:.4f} / R {report.semantic_recall:.4f})",
        f"  pairs        {report.n_pairs}",
    ]
    summary = {"diversity": report.__dict__}
    if args.transitions and args.events:
        transitions = _read_texts(args.transitions)
        events = _read_texts(args.events)
        align = alignment_score(
            AlignmentInput(knowledge, transitions, events, theta=args.theta),
            providers.entailer)
        align0 = alignment_score(
            AlignmentInput(knowledge, transitions, events, theta=0.0),
            providers.entailer)
        lines += [
            "human logic alignment",
            f"  theta = {args.theta:<4}  S_align {align.score:.4f}  "
            f"(|K|={align.k_theta_size} |T|={align.t_theta_size})",
            f"  no threshold  S_align {align0.score:.4f}  "
            f"(|K|={align0.k_theta_size} |T|={align0.t_theta_size})",
        ]
        summary["alignment"] = {"theta": args.theta,
                                "at_theta": align.__dict__,
                                "no_threshold": align0.__dict__}
    print("\n".join(lines))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(summary, sort_keys=True) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kbwalk",
                     description="MCTS-driven knowledge retrieval engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", help="build an index snapshot from a corpus TSV")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config")
    p.add_argument("--max-rows", type=int, default=None)
    p.add_argument("--cluster-threshold", type=float, default=None)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="run the retrieval pipeline over conversations")
    p.add_argument("--index", required=True)
    p.add_argument("--conversation", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--simulations", type=int, default=None)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("eval", help="diversity + alignment report over results")
    p.add_argument("--results", required=True)
    p.add_argument("--transitions")
    p.add_argument("--events")
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--config")
    p.add_argument("--out")
    p.add_argument("--max-sentences", type=int, default=50)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except KbwalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
