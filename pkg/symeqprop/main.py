"""
命令行入口 - train / evaluate / grad-check / gdu / align / selftest
"""
import argparse
import csv
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import RunConfig, load_run_config, save_run_config
from .data.loader import load_datasets
from .errors import ErrorHandler, SymEqPropError
from .network.params import init_params
from .network.readout import one_hot
from .oracles.gdu import gdu_curves, write_curve_csv
from .oracles.theorem import lemma_sweep
from .selftest import run_selftest
from .storage.checkpoint import load_checkpoint
from .tensor.precision import PRECISIONS, get_dtype, set_precision
from .trainer.alignment import alignment_trace
from .trainer.loop import evaluate, iterate_minibatches, train
from .utils.report import format_table

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON 配置文件")
    common.add_argument("--seed", type=int, default=None, help="覆盖 seed")
    common.add_argument("--out", type=str, default=None, help="覆盖输出目录 out_dir")
    common.add_argument("--estimator", type=str, default=None, help="覆盖估计方式")
    common.add_argument("--beta", type=float, default=None, help="覆盖推动强度 β")
    common.add_argument(
        "--device-precision", choices=PRECISIONS, default=None, help="浮点精度（默认 f64）"
    )
    common.add_argument("--log-level", default="INFO", help="日志级别")

    parser = argparse.ArgumentParser(prog="symeqprop", description="对称平衡传播训练与梯度检验")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("train", parents=[common], help="按配置完整训练")
    evaluate_parser = sub.add_parser("evaluate", parents=[common], help="用检查点计算测试错误率")
    evaluate_parser.add_argument("--checkpoint", type=Path, required=True, help="检查点文件 (.npz)")
    sub.add_parser("grad-check", parents=[common], help="β 扫描：估计偏差随 β 的阶数")
    sub.add_parser("gdu", parents=[common], help="导出截断估计与截断 BPTT 的逐步曲线")
    sub.add_parser("align", parents=[common], help="Kolen-Pollack 对齐角轨迹")
    sub.add_parser("selftest", parents=[common], help="在小网络上运行不变量检查")
    return parser


def _overrides(args: argparse.Namespace) -> dict:
    return {
        "seed": args.seed,
        "out_dir": args.out,
        "estimator": args.estimator,
        "beta": args.beta,
        "precision": args.device_precision,
    }


def _probe_batch(run: RunConfig) -> tuple[np.ndarray, np.ndarray]:
    """训练集的前 grad_check_samples 个样本"""
    train_set, _ = load_datasets(run.data, run.architecture)
    count = min(run.grad_check_samples, len(train_set))
    x = train_set.images[:count]
    y = one_hot(train_set.labels[:count], run.architecture.num_classes, dtype=get_dtype())
    return x, y


def _write_rows(rows: list[dict], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)
    return path


# ---- 子命令 ----

def cmd_train(run: RunConfig, args: argparse.Namespace) -> int:
    train_set, test_set = load_datasets(run.data, run.architecture)
    save_run_config(run, run.out_dir / "config.json")
    result = train(run.architecture, run.hyperparams, train_set, test_set, run.out_dir, run.train_options)
    final = result.final
    print(format_table([final], ["epoch", "train_loss", "train_err", "test_err"]))
    print(f"指标: {result.metrics_path}")
    if result.checkpoints:
        print(f"检查点: {result.checkpoints[-1]}")
    if result.collapsed:
        logger.warning("训练出现崩溃：测试错误率长期停在随机猜测水平")
    return 0


def cmd_evaluate(run: RunConfig, args: argparse.Namespace) -> int:
    checkpoint = load_checkpoint(args.checkpoint)
    _, test_set = load_datasets(replace(run.data, normalize=False), checkpoint.config)
    if checkpoint.norm_mean is not None and checkpoint.norm_std is not None:
        test_set = test_set.normalized(checkpoint.norm_mean, checkpoint.norm_std)
    err, loss = evaluate(checkpoint.params, checkpoint.config, test_set, checkpoint.hyperparams.T)
    print(format_table([{"epoch": checkpoint.epoch, "test_err": err, "test_loss": loss}]))
    return 0


def cmd_grad_check(run: RunConfig, args: argparse.Namespace) -> int:
    hp = run.hyperparams
    if args.beta is not None:
        betas = [args.beta, args.beta / 2, args.beta / 4]
    else:
        betas = run.grad_check_betas
    x, y = _probe_batch(run)
    params = init_params(run.architecture, hp.seed)
    sweep = lemma_sweep(x, y, params, run.architecture, betas, hp.T, hp.K)
    print(format_table(sweep.rows()))
    print()
    print(
        format_table(
            [
                {"estimator": "one_sided", "slope": sweep.one_sided_slope, "expected_order": 1},
                {"estimator": "symmetric", "slope": sweep.symmetric_slope, "expected_order": 2},
            ]
        )
    )
    _write_rows(sweep.rows(), run.out_dir / "grad_check.csv")
    return 0


def cmd_gdu(run: RunConfig, args: argparse.Namespace) -> int:
    hp = run.hyperparams
    x, y = _probe_batch(run)
    params = init_params(run.architecture, hp.seed)
    curve = gdu_curves(x, y, params, run.architecture, hp.T, hp.K, hp.beta)
    path = write_curve_csv(curve, run.out_dir / "gdu_curves.csv")
    one_sided = curve.terminal_cosines("one_sided")
    symmetric = curve.terminal_cosines("symmetric")
    rows = [
        {"layer": layer, "cos_one_sided": one_sided[layer], "cos_symmetric": symmetric[layer]}
        for layer in curve.layers
    ]
    print(format_table(rows))
    print(f"曲线: {path}")
    return 0


def cmd_align(run: RunConfig, args: argparse.Namespace) -> int:
    hp = run.hyperparams
    config = run.architecture
    train_set, _ = load_datasets(run.data, config)
    data_rng, est_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(hp.seed).spawn(2))

    def batches():
        while True:
            for idx in iterate_minibatches(len(train_set), hp.batch_size, data_rng):
                y = one_hot(train_set.labels[idx], config.num_classes, dtype=get_dtype())
                yield train_set.images[idx], y

    params = init_params(config, hp.seed)
    trace = alignment_trace(params, config, hp, batches(), run.align_iterations, est_rng)
    rows = trace.rows()
    path = _write_rows(rows, run.out_dir / "alignment.csv")
    print(format_table([rows[0], rows[-1]]))
    print(f"轨迹: {path}")
    return 0


def cmd_selftest(run: RunConfig, args: argparse.Namespace) -> int:
    results = run_selftest(run.hyperparams.seed)
    rows = [
        {"check": r.name, "value": r.value, "tolerance": r.tolerance, "passed": "ok" if r.passed else "FAIL"}
        for r in results
    ]
    print(format_table(rows, float_format=".2e"))
    return 0 if all(r.passed for r in results) else 1


HANDLERS = {
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "grad-check": cmd_grad_check,
    "gdu": cmd_gdu,
    "align": cmd_align,
    "selftest": cmd_selftest,
}


def main(argv: list[str] | None = None) -> int:
    """解析参数并执行子命令，返回退出码"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    handler = ErrorHandler()
    try:
        run = load_run_config(args.config, _overrides(args))
        set_precision(run.precision)
        return HANDLERS[args.command](run, args)
    except (SymEqPropError, OSError) as e:
        logger.error(handler.get_user_message(e))
        if not handler.is_unrecoverable(e):
            logger.info("可尝试增大 T、减小学习率或改用 f64 后重新运行")
        return handler.exit_code(e)


if __name__ == "__main__":
    sys.exit(main())
