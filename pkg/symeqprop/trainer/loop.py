"""
训练循环 - 逐批估计与更新、逐轮评估、指标日志与检查点
"""
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..data.augment import AugmentOptions, augment
from ..data.dataset import Dataset
from ..dynamics.relax import relax
from ..estimators.pipeline import EstimatorKind, compute_estimate
from ..network.architecture import ArchitectureConfig
from ..network.params import Parameters, init_params
from ..network.readout import loss, one_hot, predict
from ..network.state import NetworkState
from ..storage.checkpoint import checkpoint_path, prune_checkpoints, save_checkpoint
from ..storage.metrics import MetricLog, metric_columns
from ..tensor.precision import get_dtype
from .alignment import layer_angles
from .dropout import sample_masks
from .hyperparams import Hyperparams
from .optimizer import OptimizerState, kp_step, scheduled_rates, sgd_step

logger = logging.getLogger(__name__)

METRICS_FILE = "metrics.csv"


@dataclass
class TrainOptions:
    """训练循环的运行选项（与超参数无关）"""

    checkpoint_every: int = 10          # 每隔多少轮保存一次，0 表示只保存最后一轮
    keep_checkpoints: int = 3           # 保留最新的检查点个数，0 表示全部保留
    residual_warn: float = 1e-4
    augment: AugmentOptions = field(default_factory=AugmentOptions)
    estimator_seed: int | None = None   # 单独指定估计所用随机数的种子
    collapse_epochs: int = 3
    collapse_margin: float = 0.01
    save_checkpoints: bool = True


@dataclass
class TrainResult:
    params: Parameters
    history: list[dict] = field(default_factory=list)
    metrics_path: Path | None = None
    checkpoints: list[Path] = field(default_factory=list)
    collapsed: bool = False

    @property
    def final(self) -> dict:
        return self.history[-1] if self.history else {}


def iterate_minibatches(count: int, batch_size: int, rng: np.random.Generator):
    """每轮打乱一次，最后一个不足 batch_size 的批也会产出"""
    order = rng.permutation(count)
    for start in range(0, count, batch_size):
        yield order[start : start + batch_size]


def _targets(labels: np.ndarray, config: ArchitectureConfig) -> np.ndarray:
    return one_hot(labels, config.num_classes, dtype=get_dtype())


def evaluate(
    params: Parameters,
    config: ArchitectureConfig,
    dataset: Dataset,
    T: int,
    batch_size: int = 256,
) -> tuple[float, float]:
    """自由阶段预测的 (错误率, 平均损失)"""
    if len(dataset) == 0:
        return float("nan"), float("nan")
    wrong = 0
    total_loss = 0.0
    for start in range(0, len(dataset), batch_size):
        x = dataset.images[start : start + batch_size]
        labels = dataset.labels[start : start + batch_size]
        report, _ = relax(x, NetworkState.zeros(config, x.shape[0]), params, config, T)
        wrong += int(np.sum(predict(report.final_state, params, config) != labels))
        total_loss += float(np.sum(loss(report.final_state, _targets(labels, config), params, config)))
    return wrong / len(dataset), total_loss / len(dataset)


class _CollapseMonitor:
    """测试错误率连续若干轮停在随机猜测附近时报告一次"""

    def __init__(self, num_classes: int, epochs: int, margin: float):
        self.chance_err = 1.0 - 1.0 / num_classes
        self.epochs = epochs
        self.margin = margin
        self.streak = 0
        self.flagged = False

    def update(self, test_err: float, epoch: int) -> bool:
        if abs(test_err - self.chance_err) <= self.margin:
            self.streak += 1
        else:
            self.streak = 0
        if self.streak >= self.epochs and not self.flagged:
            self.flagged = True
            logger.warning(
                f"第 {epoch} 轮: 测试错误率已连续 {self.streak} 轮停在随机水平 {self.chance_err:.2%} 附近，训练可能已崩溃"
            )
        return self.flagged


def train(
    config: ArchitectureConfig,
    hp: Hyperparams,
    train_set: Dataset,
    test_set: Dataset,
    out_dir: str | Path,
    options: TrainOptions | None = None,
    params: Parameters | None = None,
    norm_stats: tuple[np.ndarray, np.ndarray] | None = None,
) -> TrainResult:
    """
    完整训练

    随机数按用途拆分为初始化、数据顺序、估计符号、dropout 与增强五路，
    同一 seed 得到相同的指标日志。第 0 轮记录任何更新之前的状态。
    """
    options = options or TrainOptions()
    hp.validate(config)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    init_seq, data_seq, est_seq, drop_seq, aug_seq = np.random.SeedSequence(hp.seed).spawn(5)
    if params is None:
        params = init_params(config, int(init_seq.generate_state(1)[0]))
    data_rng = np.random.default_rng(data_seq)
    est_rng = np.random.default_rng(
        est_seq if options.estimator_seed is None else options.estimator_seed
    )
    drop_rng = np.random.default_rng(drop_seq)
    aug_rng = np.random.default_rng(aug_seq)

    opt = OptimizerState.create(params, hp)
    update = kp_step if hp.estimator is EstimatorKind.KP_VF_SYM else sgd_step
    angle_layers = list(range(2, config.num_layers + 1)) if config.unidirectional else []
    metrics_path = out_dir / METRICS_FILE
    result = TrainResult(params, metrics_path=metrics_path)
    monitor = _CollapseMonitor(config.num_classes, options.collapse_epochs, options.collapse_margin)
    norm_mean, norm_std = norm_stats if norm_stats else (train_set.mean, train_set.std)

    def record(log: MetricLog, epoch: int, iteration: int, residuals: list[float]) -> dict:
        train_err, train_loss = evaluate(params, config, train_set, hp.T, hp.batch_size)
        test_err, _ = evaluate(params, config, test_set, hp.T, hp.batch_size)
        row = {
            "epoch": epoch,
            "iter": iteration,
            "phase_residual_free": residuals[0],
            "phase_residual_pos": residuals[1],
            "phase_residual_neg": residuals[2],
            "train_loss": train_loss,
            "train_err": train_err,
            "test_err": test_err,
        }
        row.update({f"lr_{i}": lr for i, lr in enumerate(opt.learning_rates)})
        row.update({f"angle_layer_{n}": a for n, a in layer_angles(params, config).items()})
        log.append(row)
        result.history.append(row)
        logger.info(
            f"第 {epoch} 轮: 训练损失 {train_loss:.4f}, 训练错误率 {train_err:.2%}, 测试错误率 {test_err:.2%}"
        )
        return row

    logger.info(
        f"开始训练: {hp.estimator.value}, β={hp.beta:g}, T={hp.T}, K={hp.K}, "
        f"{hp.epochs} 轮, 每批 {hp.batch_size}, 训练集 {len(train_set)}"
    )
    with MetricLog(metrics_path, metric_columns(config.num_groups, angle_layers)) as log:
        opt.learning_rates = scheduled_rates(hp, 0)
        record(log, 0, 0, [math.nan] * 3)
        iteration = 0
        for epoch in range(1, hp.epochs + 1):
            opt.epoch = epoch
            opt.learning_rates = scheduled_rates(hp, epoch - 1)
            sums = np.zeros(3)
            counts = np.zeros(3)
            warned = 0
            for idx in iterate_minibatches(len(train_set), hp.batch_size, data_rng):
                x = augment(train_set.images[idx], aug_rng, options.augment)
                y = _targets(train_set.labels[idx], config)
                masks = sample_masks(config, x.shape[0], hp.dropout_p, drop_rng, hp.dropout_layers)
                out = compute_estimate(
                    hp.estimator, x, y, params, config, hp.T, hp.K, hp.beta, est_rng, masks
                )
                update(params, out.estimate, opt, hp, config)
                iteration += 1

                rep = out.report
                for i, value in enumerate((rep.free_residual, rep.pos_residual, rep.neg_residual)):
                    if not math.isnan(value):
                        sums[i] += value
                        counts[i] += 1
                if rep.free_residual > options.residual_warn:
                    warned += 1
            if warned:
                logger.warning(
                    f"第 {epoch} 轮有 {warned} 个批的自由阶段残差超过 {options.residual_warn:g}，可考虑增大 T"
                )
            residuals = [s / c if c else math.nan for s, c in zip(sums, counts)]
            row = record(log, epoch, iteration, residuals)
            result.collapsed = monitor.update(row["test_err"], epoch)

            last = epoch == hp.epochs
            due = options.checkpoint_every > 0 and epoch % options.checkpoint_every == 0
            if options.save_checkpoints and (due or last):
                path = save_checkpoint(
                    checkpoint_path(out_dir, epoch),
                    params,
                    config,
                    hp,
                    epoch,
                    opt.buffers,
                    norm_mean,
                    norm_std,
                )
                result.checkpoints.append(path)
                prune_checkpoints(out_dir, options.keep_checkpoints)
    result.checkpoints = [p for p in result.checkpoints if p.exists()]
    return result


@dataclass
class VarianceReport:
    """每种估计方式在不同估计种子下的最终训练损失"""

    losses: dict[str, list[float]] = field(default_factory=dict)
    collapsed: dict[str, list[bool]] = field(default_factory=dict)

    def variance(self, kind: str) -> float:
        return float(np.var(self.losses[kind]))

    def collapse_count(self, kind: str) -> int:
        return sum(self.collapsed[kind])


def estimator_variance_study(
    config: ArchitectureConfig,
    hp: Hyperparams,
    train_set: Dataset,
    test_set: Dataset,
    out_dir: str | Path,
    kinds: list[EstimatorKind],
    seeds: list[int],
    options: TrainOptions | None = None,
) -> VarianceReport:
    """
    重复短训练：初始化与数据顺序相同，只改变估计所用的随机种子

    只有 random_sign 会读取估计种子；one_sided、symmetric 等确定性估计
    在各种子下的运行完全相同，方差按构造为 0。
    """
    options = options or TrainOptions()
    base_params = init_params(config, hp.seed)
    report = VarianceReport()
    for kind in kinds:
        kind = EstimatorKind.parse(kind)
        run_hp = replace(hp, estimator=kind)
        report.losses[kind.value] = []
        report.collapsed[kind.value] = []
        for seed in seeds:
            run_options = replace(options, estimator_seed=seed, save_checkpoints=False)
            run = train(
                config,
                run_hp,
                train_set,
                test_set,
                Path(out_dir) / kind.value / f"seed{seed}",
                run_options,
                base_params.copy(),
            )
            report.losses[kind.value].append(run.final["train_loss"])
            report.collapsed[kind.value].append(run.collapsed)
        logger.info(
            f"{kind.value}: 最终训练损失方差 {report.variance(kind.value):.3e}, "
            f"崩溃 {report.collapse_count(kind.value)}/{len(seeds)}"
        )
    return report
