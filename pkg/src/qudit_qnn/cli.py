"""
qudit-qnn 명령행 도구

    qudit-qnn prepare --dataset mnist
    qudit-qnn cv --dataset mnist --components 10 --neurons 2
    qudit-qnn train --data-path runs/mnist.npz --model runs/model.json
    qudit-qnn predict --model runs/model.json --input rows.csv --proba
    qudit-qnn verify
    qudit-qnn simulate-circuit --d 5
    qudit-qnn report --summary runs/summary.json

모든 RunConfig 필드는 --config JSON 파일로 주고 같은 이름의 플래그로 덮어쓸 수 있습니다.
"""

import functools
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

import click
import numpy as np

from qudit_qnn import __version__
from qudit_qnn.config import (
    ASSIGNMENT_MODES,
    LOSSES,
    ORDERING_EVALS,
    VARIANTS,
    RunConfig,
    engine_config,
    setup_logging,
)
from qudit_qnn.engine import data_pipeline, qubit_sim, trainer
from qudit_qnn.engine.data_pipeline import Dataset
from qudit_qnn.engine.linear_svm import SolverConfig
from qudit_qnn.engine.poly_features import FeatureMap, expand_batch
from qudit_qnn.engine.qudit_core import ThetaVector
from qudit_qnn.engine.trainer import TrainerConfig
from qudit_qnn.engine.verification import run_checks
from qudit_qnn.exceptions import QuditQnnError
from qudit_qnn.registry import initialize_registry
from qudit_qnn.utils import data_processor
from qudit_qnn.utils.formatters import (
    format_check_results,
    format_cv_table,
    format_distribution,
    format_model_info,
    format_summary_document,
    format_table,
)
from qudit_qnn.utils.reference_tables import DATASETS, REFERENCE_RESULTS, lookup_reference

logger = logging.getLogger(__name__)


def handle_errors(func: Callable[..., Any]) -> Callable[..., Any]:
    """QuditQnnError → 진단 한 줄 + 종료 코드 1"""

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except (QuditQnnError, FileNotFoundError) as e:
            logger.error(f"❌ {type(e).__name__}: {e}")
            click.echo(f"오류 ({type(e).__name__}): {e}", err=True)
            sys.exit(1)

    return wrapper


def run_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """RunConfig 필드와 같은 이름의 플래그"""
    options = [
        click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="RunConfig JSON 파일"),
        click.option("--dataset", type=str, help="데이터셋 이름 (mnist, emnist-digits, …)"),
        click.option("--data-path", "data_paths", multiple=True, help="준비된 npz 또는 CSV (마지막 열 레이블)"),
        click.option("--components", multiple=True, type=int, help="PCA 성분 수 k (반복 지정 시 sweep, 0 = PCA 없음)"),
        click.option("--neurons", multiple=True, type=int, help="뉴런 수 L (반복 지정 시 sweep)"),
        click.option("--variant", type=click.Choice(VARIANTS)),
        click.option("--C", "C", type=float, help="SVM 정규화 상수"),
        click.option("--scale", type=float, help="가중치 배율 (기본 100)"),
        click.option("--folds", type=int, help="교차 검증 fold 수 K"),
        click.option("--seed", type=int),
        click.option("--assignment", type=click.Choice(ASSIGNMENT_MODES)),
        click.option("--max-samples", type=int, help="층화 부분 표본 크기"),
        click.option("--output-dir", type=str),
        click.option("--loss", type=click.Choice(LOSSES)),
        click.option("--tolerance", type=float, help="SVM 멈춤 조건: 상대 쌍대 간극"),
        click.option("--max-epochs", type=int),
        click.option("--balanced-class-weight/--no-balanced-class-weight", default=None),
        click.option("--standardize-features/--no-standardize-features", default=None),
        click.option("--ordering-eval", type=click.Choice(ORDERING_EVALS)),
        click.option("--holdout-fraction", type=float),
        click.option("--pool/--no-pool", "pool_splits", default=None, help="공식 학습/평가 분할 합치기"),
        click.option("--jobs", type=int, help="병렬 스레드 수"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def resolve_config(config_path: Optional[str], **flags: Any) -> RunConfig:
    base = RunConfig.load(config_path) if config_path else RunConfig()
    overrides = {k: (v if v != () else None) for k, v in flags.items()}
    return base.with_overrides(**overrides).validate()


def trainer_config(config: RunConfig) -> TrainerConfig:
    return TrainerConfig(
        scale=config.scale,
        assignment=config.assignment,
        ordering_eval=config.ordering_eval,
        holdout_fraction=config.holdout_fraction,
        standardize_features=config.standardize_features,
        jobs=config.jobs,
        solver=SolverConfig(
            C=config.C,
            tolerance=config.tolerance,
            max_epochs=config.max_epochs,
            seed=config.seed,
            loss=config.loss,
            balanced_class_weight=config.balanced_class_weight,
        ),
    )


def load_run_dataset(config: RunConfig) -> Dataset:
    """data_paths → output_dir/<dataset>.npz → 캐시 디렉토리 IDX 순으로 찾습니다."""
    if config.data_paths:
        dataset = data_pipeline.load_dataset(config.data_paths[0])
    else:
        prepared = Path(config.output_dir) / f"{config.dataset}.npz"
        if prepared.is_file():
            dataset = data_pipeline.load_dataset(str(prepared))
        else:
            cache_dir = engine_config.cache_dir or data_processor.get_cache_dir()
            dataset = data_processor.load_registered_dataset(config.dataset, cache_dir, pool=config.pool_splits)
    return data_pipeline.subsample(dataset, config.max_samples, config.seed)


def dataset_name(config: RunConfig) -> str:
    if config.data_paths:
        return Path(config.data_paths[0]).stem
    return config.dataset


@click.group()
@click.version_option(__version__, prog_name="qudit-qnn")
@click.option("--log-level", type=str, default=None, help="로그 레벨 (기본 QUDIT_LOG_LEVEL)")
def main(log_level: Optional[str]) -> None:
    """단일 qudit 양자 신경망 다중 클래스 분류기"""
    config = replace(engine_config, log_level=log_level) if log_level else engine_config
    setup_logging(config)


@main.command()
@run_options
@click.option("--cache-dir", type=click.Path(file_okay=False), help="IDX 파일 디렉토리 (기본 QUDIT_QNN_CACHE_DIR)")
@click.option("--output", type=click.Path(dir_okay=False), help="npz 경로 (기본 <output-dir>/<dataset>.npz)")
@handle_errors
def prepare(config_path: Optional[str], cache_dir: Optional[str], output: Optional[str], **flags: Any) -> None:
    """IDX 파일을 읽어 학습용 npz를 만듭니다."""
    config = resolve_config(config_path, **flags)
    cache_dir = cache_dir or engine_config.cache_dir or data_processor.get_cache_dir()
    dataset = data_processor.load_registered_dataset(
        config.dataset, cache_dir, pool=config.pool_splits, max_samples=config.max_samples, seed=config.seed
    )
    output = output or str(Path(config.output_dir) / f"{config.dataset}.npz")
    data_pipeline.save_dataset(dataset, output)
    click.echo(f"{output}: n={dataset.n}, p={dataset.X.shape[1]}, d={dataset.d}")


@main.command()
@run_options
@click.option("--model", "model_path", type=click.Path(dir_okay=False), help="모델 JSON 경로 (기본 <output-dir>/model.json)")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="학습 보고서 JSON 경로")
@handle_errors
def train(config_path: Optional[str], model_path: Optional[str], report_path: Optional[str], **flags: Any) -> None:
    """전체 데이터로 모델 하나를 학습합니다 (components/neurons 첫 값 사용)."""
    config = resolve_config(config_path, **flags)
    dataset = load_run_dataset(config)
    k, L = config.components[0], config.neurons[0]

    pca = data_pipeline.pca_fit(dataset.X, k) if k > 0 else None
    scores = data_pipeline.pca_transform(pca, dataset.X) if pca is not None else dataset.X
    feature_map = FeatureMap(p=scores.shape[1], L=L, variant=config.variant)
    model, report = trainer.fit(
        expand_batch(feature_map, scores),
        dataset.y,
        dataset.d,
        feature_map,
        trainer_config(config),
        pca=pca,
        label_names=dataset.label_names,
        metadata={"run_config": config.to_dict(), "dataset": dataset_name(config), "data": dataset.metadata},
    )
    model_path = model_path or str(Path(config.output_dir) / "model.json")
    trainer.save_model(model, model_path)
    if report_path:
        Path(report_path).parent.mkdir(parents=True, exist_ok=True)
        Path(report_path).write_text(json.dumps(report.to_dict(), ensure_ascii=False, indent=2) + "\n", encoding="utf-8")

    accuracy = float(np.mean(trainer.predict(model, dataset.X) == dataset.y))
    click.echo(
        f"{model_path}: d={model.d}, 가중치 {feature_map.size}개 × {model.d - 1}, "
        f"SVM {report.total_fits}회, 학습 정확도 {accuracy * 100:.2f}%"
    )


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False), help="CSV / npy / npz 입력 행")
@click.option("--proba", is_flag=True, help="클래스별 확률 열 추가")
@click.option("--output", type=click.Path(dir_okay=False), help="출력 CSV (기본 stdout)")
@handle_errors
def predict(model_path: str, input_path: str, proba: bool, output: Optional[str]) -> None:
    """입력 행마다 레이블 (및 확률)을 CSV로 출력합니다."""
    model = trainer.load_model(model_path)
    X = data_pipeline.load_inputs(input_path)
    labels = trainer.predict(model, X)
    header = ["label"]
    if proba:
        probabilities = trainer.predict_proba(model, X)
        header += [f"p_{model.label_name(j)}" for j in range(model.d)]
    lines = [",".join(header)]
    for i, label in enumerate(labels):
        row = [model.label_name(int(label))]
        if proba:
            row += [repr(float(p)) for p in probabilities[i]]
        lines.append(",".join(row))
    text = "\n".join(lines) + "\n"
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@main.command()
@click.option("--model", "model_path", required=True, type=click.Path(exists=True, dir_okay=False))
@handle_errors
def info(model_path: str) -> None:
    """모델 파일의 구조 (특성 맵, PCA, 결과 ↔ 레이블 배정)를 출력합니다."""
    click.echo(format_model_info(trainer.load_model(model_path)), nl=False)


@main.command()
@run_options
@handle_errors
def cv(config_path: Optional[str], **flags: Any) -> None:
    """(components × neurons) sweep에 대해 층화 K-fold 교차 검증을 실행합니다."""
    config = resolve_config(config_path, **flags)
    dataset = load_run_dataset(config)
    name = dataset_name(config)
    tconfig = trainer_config(config)
    # fold 병렬일 때 후보 SVM은 순차
    fold_jobs = config.jobs
    tconfig = replace(tconfig, jobs=1) if fold_jobs > 1 else tconfig

    results = []
    for k in config.components:
        for L in config.neurons:
            result = data_pipeline.cross_validate(
                dataset, k, L, tconfig, folds=config.folds, seed=config.seed,
                variant=config.variant, jobs=fold_jobs, name=name,
            )
            result.metadata["max_samples"] = config.max_samples
            result.metadata["subsample_size"] = dataset.n
            result.metadata["pooled"] = dataset.metadata.get("pooled", config.pool_splits)
            results.append(result)

    out = Path(config.output_dir)
    data_pipeline.write_metrics_csv(str(out / "metrics.csv"), results)
    data_pipeline.write_summary_json(str(out / "summary.json"), results, config.to_dict())
    config.save(str(out / "run_config.json"))
    click.echo(format_cv_table(results), nl=False)
    click.echo(f"결과: {out / 'metrics.csv'}, {out / 'summary.json'}")


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--check", "checks", multiple=True, help="실행할 점검 이름 (반복 가능)")
@click.option("--perturb-denominator", type=float, default=0.0, hidden=True)
@handle_errors
def verify(seed: int, checks: List[str], perturb_denominator: float) -> None:
    """수학 자기 점검을 실행합니다. 하나라도 실패하면 종료 코드 1."""
    registry = initialize_registry()
    unknown = [c for c in checks if registry.get_check(c) is None]
    if unknown:
        raise click.BadParameter(f"알 수 없는 점검: {unknown} (가능: {list(registry.get_all_checks())})")
    results = run_checks(registry, seed=seed, denominator_offset=perturb_denominator, names=list(checks) or None)
    click.echo(format_check_results(results), nl=False)
    failed = [r.name for r in results if not r.passed]
    if failed:
        click.echo(f"실패한 점검: {failed[0]}", err=True)
        sys.exit(1)


@main.command("simulate-circuit")
@click.option("--theta", type=str, help="쉼표로 구분한 각도 (라디안)")
@click.option("--d", "d", type=int, help="--theta 생략 시 무작위 θ의 차원")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--output", type=click.Path(dir_okay=False), help="회로 JSON 경로")
@handle_errors
def simulate_circuit(theta: Optional[str], d: Optional[int], seed: int, output: Optional[str]) -> None:
    """θ를 qubit 회로로 컴파일해 측정 분포를 출력합니다."""
    if theta:
        vector = ThetaVector.of([float(v) for v in theta.split(",") if v.strip()])
    elif d is not None:
        rng = np.random.default_rng(seed)
        vector = ThetaVector(d=d, angles=rng.uniform(0.01, np.pi - 0.01, size=max(d - 1, 0)))
    else:
        raise click.UsageError("--theta 또는 --d 가 필요합니다")
    circuit = qubit_sim.compile(vector)
    dist = qubit_sim.measurement_distribution(qubit_sim.simulate(circuit), vector.d)
    click.echo(format_distribution(dist, qubit_sim.gate_count_report(circuit)), nl=False)
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(qubit_sim.circuit_to_json(circuit), encoding="utf-8")
        click.echo(f"회로: {output}")


@main.command()
@click.option("--summary", "summary_path", type=click.Path(exists=True, dir_okay=False), help="cv가 남긴 summary.json")
@click.option("--dataset", type=str, help="참조표만 출력할 데이터셋")
@handle_errors
def report(summary_path: Optional[str], dataset: Optional[str]) -> None:
    """실행 요약을 참조 결과와 나란히 출력합니다."""
    if summary_path:
        document = json.loads(Path(summary_path).read_text(encoding="utf-8"))
        click.echo(format_summary_document(document), nl=False)
        return
    names = [dataset] if dataset else list(REFERENCE_RESULTS)
    rows: List[Dict[str, Any]] = []
    for name in names:
        if name not in DATASETS:
            raise click.BadParameter(f"알 수 없는 데이터셋: {name}")
        for (k, L) in sorted(REFERENCE_RESULTS.get(name, {})):
            acc, std, seconds = lookup_reference(name, k, L) or (0.0, 0.0, 0.0)
            rows.append({
                "dataset": name,
                "components": k,
                "neurons": L,
                "weights": FeatureMap(p=k, L=L).size,
                "accuracy": f"{acc:.2f} ({std:.2f})",
                "seconds": f"{seconds:.2f}",
            })
    click.echo(format_table(rows), nl=False)


@main.command()
@click.argument("urls", nargs=-1, required=True)
@click.option("--dest", type=click.Path(file_okay=False), help="저장 디렉토리 (기본 캐시 디렉토리)")
@click.option("--timeout", type=int, default=None)
@handle_errors
def fetch(urls: List[str], dest: Optional[str], timeout: Optional[int]) -> None:
    """지정한 URL의 데이터셋 파일을 캐시 디렉토리로 내려받습니다."""
    from qudit_qnn.utils.dataset_fetch import fetch as fetch_file

    dest = dest or engine_config.cache_dir or data_processor.get_cache_dir()
    for url in urls:
        click.echo(str(fetch_file(url, dest, timeout=timeout)))


@main.command()
@click.option("--transport", type=click.Choice(["stdio", "http"]), default=None)
def serve(transport: Optional[str]) -> None:
    """MCP 서버를 실행합니다."""
    from qudit_qnn.server import main as serve_main

    serve_main(transport)


if __name__ == "__main__":
    main()
