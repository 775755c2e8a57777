"""
RobustCS Command Line
=====================
ממשק שורת הפקודה: סימולציה, סריקה, יועץ גודל צעד, שחזור תמונה ויצירת בעיה.

שימוש:
    python scripts/cli_tool.py simulate --config configs/gmm_convergence.toml
    python scripts/cli_tool.py sweep --config configs/k_sweep.toml --threads 4
    python scripts/cli_tool.py advise-stepsize --N 1000 --M 300
    python scripts/cli_tool.py image --synthetic 64x64 --config configs/image.toml
    python scripts/cli_tool.py make-problem --config configs/gmm_convergence.toml

קודי יציאה: 0 הצלחה, 2 ולידציה, 3 ריצה/IO, 4 רוב הריצות התבדרו.
"""

import argparse
import json
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pydantic import ValidationError

from . import __version__
from .config import settings
from .errors import DivergenceError, ReconstructionError
from .harness import (
    divergence_dominated,
    learning_curve,
    result_stem,
    run_sweep,
    write_learning_curve,
    write_sweep,
)
from .image import (
    read_matrix_csv,
    read_pgm,
    reconstruct_image,
    synthetic_pattern,
    write_matrix_csv,
    write_pgm,
)
from .models.experiment import ExperimentConfig
from .models.stability import StabilityInputs, StabilityRegime
from .problem import build_problem, export_problem_csv, save_problem_npz
from .stability import advise

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RUNTIME = 3
EXIT_DIVERGENCE = 4

_REGIMES = {
    "rademacher": [StabilityRegime.RADEMACHER],
    "bounded": [StabilityRegime.BOUNDED_NOISE],
    "gaussian": [StabilityRegime.GAUSSIAN_NOISE],
    "all": None,
}


class UsageError(Exception):
    """שילוב דגלים לא חוקי (קוד יציאה 2)"""


# ==================== Config ====================

def load_config(path: Optional[str]) -> ExperimentConfig:
    """
    טען קובץ תצורה (TOML או JSON); None מחזיר את ברירות המחדל

    Raises:
        OSError: הקובץ לא קריא
        ValidationError: סכמה לא תקינה (כולל מפתחות לא מוכרים)
        ValueError: תחביר לא תקין
    """
    if path is None:
        return ExperimentConfig()
    config_path = Path(path)
    text = config_path.read_text(encoding="utf-8")
    if config_path.suffix.lower() == ".json":
        data = json.loads(text)
    else:
        data = tomllib.loads(text)
    return ExperimentConfig.model_validate(data)


def apply_overrides(config: ExperimentConfig, args: argparse.Namespace) -> ExperimentConfig:
    """דגלי שורת הפקודה דורסים את הקובץ"""
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "trace_stride", None) is not None:
        updates["trace_stride"] = args.trace_stride
    if getattr(args, "trials", None) is not None:
        updates["trials"] = args.trials
    if not updates:
        return config
    return ExperimentConfig.model_validate({**config.model_dump(), **updates})


def output_dir(config: ExperimentConfig, args: argparse.Namespace) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    if config.output_dir is not None:
        return config.output_dir
    return settings.output_dir


def thread_count(args: argparse.Namespace) -> int:
    threads = getattr(args, "threads", None)
    return max(1, threads if threads is not None else settings.threads)


def _format_validation(error: ValidationError) -> List[str]:
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"])
        lines.append(f"{location or '<root>'}: {item['msg']}")
    return lines


def _banner(title: str) -> None:
    print(f"\n{'=' * 50}")
    print(title)
    print(f"{'=' * 50}")


# ==================== Commands ====================

def cmd_simulate(args: argparse.Namespace) -> int:
    """עקומות למידה בנקודה קבועה"""
    config = apply_overrides(load_config(args.config), args)
    out = output_dir(config, args)
    print(f"📁 simulate: N={config.problem.N} M={config.problem.M} K={config.problem.K}, "
          f"{config.trials} trials, seed={config.seed}")

    result = learning_curve(config, threads=thread_count(args))
    paths = write_learning_curve(result, config, out, stem=args.stem)

    _banner("📊 סיכום הסימולציה:")
    for cfg in config.solvers:
        label = cfg.label
        mine = [r for r in result.trials if r.solver == label]
        successes = sum(r.success for r in mine)
        diverged = sum(r.diverged for r in mine)
        curve = result.curves.get(label)
        final = f"{curve['msd'].iloc[-1]:.3e}" if curve is not None else "-"
        print(f"  🔍 {label}: final MSD {final}, "
              f"success {successes}/{len(mine)}, diverged {diverged}")
    for kind, path in paths.items():
        print(f"  ✅ {kind}: {path}")

    return EXIT_DIVERGENCE if divergence_dominated(result.trials) else EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    """סריקת פרמטר: הסתברות שחזור ו-MSD לכל נקודה"""
    config = apply_overrides(load_config(args.config), args)
    out = output_dir(config, args)
    axis = config.sweep.parameter.value if config.sweep else "-"
    print(f"📁 sweep over {axis}: {len(config.sweep.values) if config.sweep else 1} points, "
          f"{config.trials} trials, seed={config.seed}")

    report = run_sweep(config, threads=thread_count(args))
    paths = write_sweep(report, out, stem=args.stem)

    _banner("📊 תוצאות הסריקה:")
    for result in report.results:
        msd = f"{result.msd_success:.3e}" if result.msd_success is not None else "-"
        print(f"  {axis}={result.axis_value}  {result.solver:<12} p={result.probability:.2f}  "
              f"MSD={msd}  diverged={result.diverged}")
    for kind, path in paths.items():
        print(f"  ✅ {kind}: {path}")

    return EXIT_DIVERGENCE if divergence_dominated(report.trials) else EXIT_OK


def parse_fraction(text: str) -> float:
    """'1/300' או '0.0033'"""
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a positive number: {text}") from exc


def cmd_advise_stepsize(args: argparse.Namespace) -> int:
    """טבלת חסמי גודל הצעד"""
    if args.sigma_a_sq is not None:
        sigma_a_sq = args.sigma_a_sq
    elif args.M is not None:
        sigma_a_sq = 1.0 / args.M
    else:
        raise UsageError("give --sigma-a-sq or --M")

    regimes = _REGIMES[args.regime]
    if args.regime == "bounded" and (args.v_max is None or args.sigma is None):
        raise UsageError("bounded regime needs --v-max and --sigma")
    if args.sigma_v_sq is not None and args.sigma is None:
        raise UsageError("--sigma-v-sq needs --sigma for the closed forms")

    inputs = StabilityInputs(
        N=args.N,
        sigma_a_sq=sigma_a_sq,
        sigma=args.sigma,
        v_max=args.v_max,
        sigma_v_sq=args.sigma_v_sq,
        wtilde_norm_sq=args.wtilde_norm_sq,
    )
    report = advise(inputs, regimes)

    if args.json:
        print(report.model_dump_json(indent=2))
        return EXIT_OK

    _banner(f"📐 Step-size bounds (N={inputs.N}, σ_a²={inputs.sigma_a_sq:.6g})")
    print(f"  {'regime':<16}{'bound':>12}{'suggested μ':>14}")
    for row in report.rows:
        print(f"  {row.regime.value:<16}{row.bound:>12.6f}{row.suggested_mu:>14.6f}")
    if report.P_H is not None:
        print(f"\n  🔬 Gaussian noise σ_v²={inputs.sigma_v_sq:.6g}, ||w~||²={inputs.wtilde_norm_sq:.6g}:")
        print(f"     P_H = {report.P_H:.6f}   P_K = {report.P_K:.6f}")
    return EXIT_OK


def _parse_size(text: str) -> tuple:
    try:
        height, width = (int(part) for part in text.lower().split("x"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected HxW, got {text}") from exc
    if height < 1 or width < 1:
        raise argparse.ArgumentTypeError(f"expected positive HxW, got {text}")
    return height, width


def cmd_image(args: argparse.Namespace) -> int:
    """שחזור תמונה בשיטת block CS"""
    config = apply_overrides(load_config(args.config), args)
    out = output_dir(config, args)

    as_csv = False
    if args.synthetic:
        height, width = args.synthetic
        image = synthetic_pattern(height, width, seed=config.seed)
        stem = f"{args.stem}_synthetic{height}x{width}"
    elif args.image:
        source = Path(args.image)
        as_csv = source.suffix.lower() == ".csv"
        image = read_matrix_csv(source) if as_csv else read_pgm(source)
        stem = f"{args.stem}_{source.stem}"
    else:
        raise UsageError("give an image path or --synthetic HxW")

    settings_ = config.image
    cfg = config.solvers[0]
    if config.trace_stride is not None and cfg.trace_stride is None:
        cfg = cfg.model_copy(update={"trace_stride": config.trace_stride})
    print(f"📁 image {image.shape[0]}x{image.shape[1]}, B={settings_.patch_size}, "
          f"M={settings_.measurements}, solver={cfg.label}, seed={config.seed}")

    result = reconstruct_image(
        image,
        s=settings_.s,
        M_img=settings_.measurements,
        noise=config.noise,
        cfg=cfg,
        seed=config.seed,
        patch_size=settings_.patch_size,
        kind=settings_.sensing,
        entry_variance=settings_.entry_variance,
        threads=thread_count(args),
    )

    out.mkdir(parents=True, exist_ok=True)
    base = out / result_stem(stem, config.seed)
    # הפלט באותו פורמט כמו הקלט
    if as_csv:
        image_path = write_matrix_csv(result.image, base.with_name(base.name + "_reconstructed.csv"))
    else:
        image_path = write_pgm(result.image, base.with_name(base.name + "_reconstructed.pgm"))
    report_path = base.with_name(base.name + "_report.json")
    report_path.write_text(result.report.model_dump_json(indent=2), encoding="utf-8")
    timings_path = base.with_name(base.name + "_timings.json")
    timings_path.write_text(
        json.dumps({"block_seconds": result.block_times}, indent=2), encoding="utf-8"
    )

    report = result.report
    _banner("🖼️  תוצאת השחזור:")
    psnr_text = "inf" if math.isinf(report.psnr) else f"{report.psnr:.2f} dB"
    print(f"  📈 PSNR: {psnr_text}")
    print(f"  🧩 blocks: {report.blocks}, failed: {len(report.failed_blocks)}")
    for path in (image_path, report_path, timings_path):
        print(f"  ✅ {path}")

    if report.failed_blocks and len(report.failed_blocks) * 2 > report.blocks:
        return EXIT_DIVERGENCE
    return EXIT_OK


def cmd_make_problem(args: argparse.Namespace) -> int:
    """כתוב בעיה אחת (npz + CSV) לבדיקה חיצונית"""
    config = apply_overrides(load_config(args.config), args)
    out = output_dir(config, args)
    problem_settings = config.problem
    problem = build_problem(
        problem_settings.N,
        problem_settings.M,
        problem_settings.K,
        noise=config.noise,
        seed=config.seed,
        nonzero_dist=problem_settings.nonzero,
        normalize=problem_settings.normalize,
        kind=problem_settings.sensing,
        entry_variance=problem_settings.variance_for(problem_settings.M),
    )
    stem = result_stem(args.stem, config.seed)
    npz_path = save_problem_npz(problem, out / f"{stem}.npz")
    matrix_path, y_path = export_problem_csv(problem, out, stem=stem)

    _banner("🧪 בעיה נוצרה:")
    print(f"  M={problem.M} N={problem.N} K={problem.truth.K}")
    for path in (npz_path, matrix_path, y_path):
        print(f"  ✅ {path}")
    return EXIT_OK


# ==================== Parser ====================

def _add_common(parser: argparse.ArgumentParser, stem: str) -> None:
    parser.add_argument("--config", help="קובץ תצורה (TOML או JSON)")
    parser.add_argument("--seed", type=int, help="master seed (דורס את הקובץ)")
    parser.add_argument("--out", help="תיקיית פלט (ברירת מחדל: ROBUSTCS_OUTPUT_DIR או results)")
    parser.add_argument("--threads", type=int, help="מספר תהליכים מקסימלי")
    parser.add_argument("--trace-stride", type=int, dest="trace_stride", help="צעד דגימת ה-trace")
    parser.add_argument("--stem", default=stem, help="קידומת לשמות קבצי הפלט")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robustcs",
        description="🚀 RobustCS - שחזור דחיסה עמיד לרעש אימפולסיבי (l0-MCC / MB-l0-MCC)",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
דוגמאות שימוש:
  robustcs simulate --config configs/gmm_convergence.toml
  robustcs sweep --config configs/k_sweep.toml --threads 4
  robustcs advise-stepsize --N 1000 --sigma-a-sq 1/300 --regime gaussian
  robustcs image --synthetic 64x64 --config configs/image_exact.toml
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="לוג מפורט (DEBUG)")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="עקומות למידה בנקודה קבועה")
    _add_common(simulate, "simulate")
    simulate.add_argument("--trials", type=int, help="מספר ניסויים (דורס את הקובץ)")
    simulate.set_defaults(handler=cmd_simulate)

    sweep = sub.add_parser("sweep", help="סריקת פרמטר")
    _add_common(sweep, "sweep")
    sweep.add_argument("--trials", type=int, help="מספר ניסויים (דורס את הקובץ)")
    sweep.set_defaults(handler=cmd_sweep)

    stepsize = sub.add_parser("advise-stepsize", help="חסמי גודל הצעד")
    stepsize.add_argument("--N", type=int, required=True, help="אורך האות")
    stepsize.add_argument("--M", type=int, help="מספר מדידות (σ_a² = 1/M)")
    stepsize.add_argument("--sigma-a-sq", type=parse_fraction, dest="sigma_a_sq",
                          help="שונות כניסות המטריצה, למשל 1/300")
    stepsize.add_argument("--sigma", type=float, help="רוחב הגרעין (רעש חסום)")
    stepsize.add_argument("--v-max", type=float, dest="v_max", help="חסם הרעש (רעש חסום)")
    stepsize.add_argument("--sigma-v-sq", type=float, dest="sigma_v_sq",
                          help="שונות רעש גאוסי (עם --sigma: מדפיס P_H/P_K)")
    stepsize.add_argument("--wtilde-norm-sq", type=float, dest="wtilde_norm_sq", default=1.0,
                          help="||w~||² עבור P_H/P_K (ברירת מחדל 1)")
    stepsize.add_argument("--regime", choices=sorted(_REGIMES), default="all")
    stepsize.add_argument("--json", action="store_true", help="פלט JSON")
    stepsize.set_defaults(handler=cmd_advise_stepsize)

    image = sub.add_parser("image", help="שחזור תמונה בשיטת block CS")
    image.add_argument("image", nargs="?", help="קובץ PGM בגווני אפור, או מטריצת פיקסלים ב-CSV")
    image.add_argument("--synthetic", type=_parse_size, help="תמונה סינתטית HxW במקום קובץ")
    _add_common(image, "image")
    image.set_defaults(handler=cmd_image)

    make_problem = sub.add_parser("make-problem", help="כתוב בעיה ל-npz ו-CSV")
    _add_common(make_problem, "problem")
    make_problem.set_defaults(handler=cmd_make_problem)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_VALIDATION

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"❌ usage error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        print("❌ invalid configuration:", file=sys.stderr)
        for line in _format_validation(exc):
            print(f"     - {line}", file=sys.stderr)
        return EXIT_VALIDATION
    except DivergenceError as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (ReconstructionError, ValueError) as exc:
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"❌ I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:
        logger.exception("unexpected failure")
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
