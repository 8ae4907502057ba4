"""Command-line interface.

Commands:
    cknna A B            score two feature files
    se-cknna MANIFEST    per-condition scores and the aggregate
    layer-profile MANIFEST
                         layer-wise profile against a reference
    synth                generate a toy corpus, feature files, and manifest
    oracle-check         fast-vs-reference equivalence sweep

Exit codes: 0 success, 1 input or validation error, 2 degenerate metric,
3 equivalence-sweep mismatch. Reports go to --out when given (summary on
stdout), otherwise the report itself is stdout and the summary moves to
stderr so piped output stays parseable.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from . import __version__
from .errors import DegenerateMask, RepalignError, ValidationError
from .features import FeatureSet, OutlierPolicy, TokenFeatureSet
from .pipeline import AGGREGATORS, Settings, score_pair
from .profiles import layer_profile
from .rafs import load_features, write_rafs
from .report import (
    AlignmentReport,
    canonical_json,
    emit_report,
    file_digest,
    report_cknna,
    report_layer_profile,
    report_se_cknna,
)
from .secknna import se_cknna
from .selfcheck import SWEEP_TOLERANCE, equivalence_sweep, max_delta
from .toy import MODES, extract_corpus, model_seeds, synth_corpus
from .transforms import (
    TransformCondition,
    canonical_order,
    default_suite,
    suite_to_json,
    transform_corpus,
)

_DEFAULTS: dict[str, Any] = {
    "k": 10,
    "normalize": True,
    "outlier": "norm_mad",
    "mad_mult": 5.0,
    "agg": "mean",
    "seed": 0,
    "format": "json",
    "out": None,
}


class _Parser(argparse.ArgumentParser):
    """argparse variant honoring the exit-code contract (usage errors -> 1)."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    """Effective settings after merging defaults, config file, and flags."""

    k: int = 10
    normalize: bool = True
    outlier: str = "norm_mad"
    mad_mult: float = 5.0
    agg: str = "mean"
    seed: int = 0
    format: str = "json"
    out: str | None = None

    def settings(self) -> Settings:
        return Settings(
            k=self.k,
            normalize=self.normalize,
            outlier=OutlierPolicy(self.outlier, self.mad_mult),
            aggregator=self.agg,
        )


def _load_json(path: str | Path, what: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what} {path}: invalid JSON: {exc}") from exc


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge precedence: explicit flags beat the config file beat defaults."""
    cfg: dict[str, Any] = {}
    if getattr(args, "config", None):
        loaded = _load_json(args.config, "config file")
        if not isinstance(loaded, dict):
            raise ValidationError(f"config file {args.config}: expected a JSON object")
        unknown = sorted(set(loaded) - set(_DEFAULTS))
        if unknown:
            raise ValidationError(f"config file {args.config}: unknown keys {unknown}")
        cfg = loaded

    def pick(name: str) -> Any:
        flag = getattr(args, name.replace("-", "_"), None)
        if flag is not None:
            return flag
        if name in cfg and cfg[name] is not None:
            return cfg[name]
        return _DEFAULTS[name]

    normalize = pick("normalize")
    if not isinstance(normalize, bool):
        raise ValidationError("config key 'normalize' must be true or false")
    out = pick("out")
    config = RunConfig(
        k=int(pick("k")),
        normalize=normalize,
        outlier=str(pick("outlier")),
        mad_mult=float(pick("mad_mult")),
        agg=str(pick("agg")),
        seed=int(pick("seed")),
        format=str(pick("format")),
        out=str(out) if out is not None else None,
    )
    if config.format not in ("json", "csv"):
        raise ValidationError(f"unknown output format {config.format!r}")
    if config.agg not in AGGREGATORS:
        raise ValidationError(f"unknown aggregator {config.agg!r}")
    if config.outlier not in ("none", "norm_mad"):
        raise ValidationError(f"unknown outlier method {config.outlier!r}")
    return config


def _deliver(report: AlignmentReport, config: RunConfig, summary: str) -> None:
    payload = emit_report(report, config.format)
    if config.out:
        Path(config.out).write_bytes(payload)
        print(summary)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
        print(summary, file=sys.stderr)


def _require_file(path: str, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"{what} not found: {path}")
    return p


def cmd_cknna(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    settings = config.settings()
    path_a = _require_file(args.file_a, "feature file")
    path_b = _require_file(args.file_b, "feature file")
    score = score_pair(load_features(path_a), load_features(path_b), settings)
    report = report_cknna(
        score, settings, [file_digest(path_a), file_digest(path_b)], __version__
    )
    _deliver(
        report,
        config,
        f"cknna value={score.value:.6f} k={score.k} "
        f"n_effective={score.n_effective} mask_density={score.mask_density:.4f}",
    )
    return 0


def _load_se_manifest(
    path: Path,
) -> tuple[
    dict[TransformCondition, FeatureSet | TokenFeatureSet],
    dict[TransformCondition, FeatureSet | TokenFeatureSet],
    list[dict[str, str]],
]:
    obj = _load_json(path, "manifest")
    if not isinstance(obj, dict) or obj.get("kind") != "se_cknna_manifest":
        raise ValidationError(f"{path}: not an se_cknna manifest")
    rows = obj.get("conditions")
    if not isinstance(rows, list) or not rows:
        raise ValidationError(f"{path}: manifest lists no conditions")
    base = path.parent
    features_a: dict[TransformCondition, FeatureSet | TokenFeatureSet] = {}
    features_b: dict[TransformCondition, FeatureSet | TokenFeatureSet] = {}
    paths: dict[TransformCondition, tuple[Path, Path]] = {}
    for row in rows:
        cond = TransformCondition.from_dict(row["condition"])
        if cond in features_a:
            raise ValidationError(f"{path}: duplicate condition {cond.label()}")
        file_a = _require_file(str(base / row["a"]), f"feature file for {cond.label()} (A)")
        file_b = _require_file(str(base / row["b"]), f"feature file for {cond.label()} (B)")
        features_a[cond] = load_features(file_a)
        features_b[cond] = load_features(file_b)
        paths[cond] = (file_a, file_b)
    digests = [file_digest(path)]
    for cond in canonical_order(list(paths)):
        digests.append(file_digest(paths[cond][0]))
        digests.append(file_digest(paths[cond][1]))
    return features_a, features_b, digests


def cmd_se_cknna(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    settings = config.settings()
    manifest = _require_file(args.manifest, "manifest")
    features_a, features_b, digests = _load_se_manifest(manifest)
    result = se_cknna(features_a, features_b, settings)
    report = report_se_cknna(result, settings, digests, __version__)
    _deliver(
        report,
        config,
        f"se_cknna aggregate={result.aggregate:.6f} baseline={result.baseline:.6f} "
        f"relative_change={result.relative_change * 100.0:+.2f}% "
        f"aggregator={result.aggregator}",
    )
    return 0


def cmd_layer_profile(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    settings = config.settings()
    manifest = _require_file(args.manifest, "manifest")
    obj = _load_json(manifest, "manifest")
    if not isinstance(obj, dict) or obj.get("kind") != "layer_profile_manifest":
        raise ValidationError(f"{manifest}: not a layer_profile manifest")
    rows = obj.get("layers")
    if not isinstance(rows, list) or not rows:
        raise ValidationError(f"{manifest}: manifest lists no layers")
    base = manifest.parent
    ref_path = _require_file(str(base / obj["reference"]), "reference feature file")
    reference = load_features(ref_path)
    layer_paths = [_require_file(str(base / row["path"]), "layer feature file") for row in rows]
    layers = [load_features(p) for p in layer_paths]
    with_index = [row for row in rows if "layer_index" in row]
    if with_index and len(with_index) != len(rows):
        raise ValidationError(f"{manifest}: give layer_index on every layer or on none")
    indices = [int(row["layer_index"]) for row in rows] if with_index else None
    level = obj.get("reference_level")
    profile = layer_profile(
        layers,
        reference,
        settings,
        layer_indices=indices,
        reference_level=float(level) if level is not None else None,
    )
    digests = [file_digest(manifest), file_digest(ref_path)]
    digests.extend(file_digest(p) for p in layer_paths)
    report = report_layer_profile(profile, settings, digests, __version__)
    _deliver(
        report,
        config,
        f"layer_profile peak_layer={profile.peak[0]} peak_value={profile.peak[1]:.6f} "
        f"mean={profile.mean_score:.6f} layers={len(profile.entries)}",
    )
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    if args.n < 1:
        raise ValidationError("--n must be at least 1")
    if args.d < 1:
        raise ValidationError("--d must be at least 1")
    if args.mode not in MODES:
        raise ValidationError(f"unknown mode {args.mode!r}")
    outdir = Path(args.outdir)
    feature_dir = outdir / "features"
    feature_dir.mkdir(parents=True, exist_ok=True)
    images = synth_corpus(args.seed, args.n, args.size)
    suite = default_suite(args.seed)
    seed_a, seed_b = model_seeds(args.seed)
    manifest_rows = []
    for cond in suite:
        transformed = transform_corpus(images, cond)
        rel_a = f"features/a_{cond.label()}.rafs"
        rel_b = f"features/b_{cond.label()}.rafs"
        for rel, seed, side in ((rel_a, seed_a, "a"), (rel_b, seed_b, "b")):
            fs = extract_corpus(
                transformed,
                seed,
                args.d,
                args.mode,
                model_id=f"toy-{args.mode}-{side}",
                condition=cond,
            )
            write_rafs(outdir / rel, fs)
        manifest_rows.append({"condition": cond.to_dict(), "a": rel_a, "b": rel_b})
    manifest = {"kind": "se_cknna_manifest", "conditions": manifest_rows}
    (outdir / "manifest.json").write_bytes(canonical_json(manifest))
    (outdir / "suite.json").write_bytes(canonical_json({"conditions": suite_to_json(suite)}))
    print(f"wrote {len(suite)} condition pairs under {outdir}")
    print(f"manifest: {outdir / 'manifest.json'}")
    return 0


def cmd_oracle_check(args: argparse.Namespace) -> int:
    instances = equivalence_sweep(args.seed)
    for inst in instances:
        print(
            f"{inst.index:>3}  n={inst.n:>3} d={inst.d:>2} k={inst.k:>2}  "
            f"fast={inst.fast:+.12f}  reference={inst.reference:+.12f}  "
            f"delta={inst.delta:.3e}"
        )
    worst = max_delta(instances)
    print(f"instances: {len(instances)}  max |delta| = {worst:.3e}  tolerance = {SWEEP_TOLERANCE:.0e}")
    if worst <= SWEEP_TOLERANCE:
        print("equivalence: PASS")
        return 0
    print("equivalence: FAIL")
    return 3


def _add_run_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--k", type=int, default=None, help="neighborhood size (default 10)")
    sub.add_argument(
        "--no-normalize",
        dest="normalize",
        action="store_const",
        const=False,
        default=None,
        help="skip channel normalization",
    )
    sub.add_argument("--outlier", choices=("none", "norm_mad"), default=None,
                     help="outlier filtering method (default norm_mad)")
    sub.add_argument("--mad-mult", type=float, default=None,
                     help="outlier threshold in MAD units (default 5.0)")
    sub.add_argument("--agg", choices=AGGREGATORS, default=None,
                     help="aggregator over non-identity conditions (default mean)")
    sub.add_argument("--seed", type=int, default=None, help="run seed recorded in config")
    sub.add_argument("--format", choices=("json", "csv"), default=None,
                     help="report format (default json)")
    sub.add_argument("--out", default=None, help="report file (default: stdout)")
    sub.add_argument("--config", default=None, help="JSON config file; flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="repalign", description="Representation alignment diagnostics.")
    parser.add_argument("--version", action="version", version=f"repalign {__version__}")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = subs.add_parser("cknna", help="score two feature files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    _add_run_flags(p)
    p.set_defaults(func=cmd_cknna)

    p = subs.add_parser("se-cknna", help="score a transform-suite manifest")
    p.add_argument("manifest")
    _add_run_flags(p)
    p.set_defaults(func=cmd_se_cknna)

    p = subs.add_parser("layer-profile", help="profile layers against a reference")
    p.add_argument("manifest")
    _add_run_flags(p)
    p.set_defaults(func=cmd_layer_profile)

    p = subs.add_parser("synth", help="generate a toy corpus with manifest")
    p.add_argument("--outdir", required=True, help="output directory")
    p.add_argument("--n", type=int, default=64, help="image count (default 64)")
    p.add_argument("--d", type=int, default=32, help="feature dimension (default 32)")
    p.add_argument("--size", type=int, default=32, help="image side length (default 32)")
    p.add_argument("--seed", type=int, default=0, help="base seed (default 0)")
    p.add_argument("--mode", choices=MODES, default="generic",
                   help="extractor mode (default generic)")
    p.set_defaults(func=cmd_synth)

    p = subs.add_parser("oracle-check", help="fast-vs-reference equivalence sweep")
    p.add_argument("--seed", type=int, default=0, help="sweep base seed (default 0)")
    p.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return int(args.func(args))
    except DegenerateMask as exc:
        print(f"error (degenerate metric): {exc}", file=sys.stderr)
        return 2
    except RepalignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
