"""
보고서 포맷팅 유틸리티

교차 검증 요약, 자기 점검 결과, 모델 정보, 회로 분포 출력 형식을 중앙 관리합니다.
정확도는 "90.36 (0.22)" 처럼 백분율 평균 (표본 표준편차)로 씁니다.
"""

from typing import Any, Dict, List, Optional, Sequence

from qudit_qnn.utils.reference_tables import lookup_reference


def format_mean_std(mean: float, std: float, percent: bool = True) -> str:
    factor = 100.0 if percent else 1.0
    return f"{mean * factor:.2f} ({std * factor:.2f})"


def cv_summary_row(result: Any) -> Dict[str, Any]:
    """CvResult 한 건을 참조값과 나란히 놓은 행"""
    acc = result.accuracy
    row: Dict[str, Any] = {
        "dataset": result.dataset,
        "components": result.components,
        "neurons": result.neurons,
        "variant": result.variant,
        "weights": result.weights,
        "accuracy": format_mean_std(acc.mean, acc.std),
        "seconds": f"{result.seconds.mean:.2f}",
        "reference": "-",
        "delta": "-",
    }
    reference = lookup_reference(result.dataset, result.components, result.neurons, result.variant)
    if reference is not None:
        ref_acc, ref_std, ref_seconds = reference
        row["reference"] = f"{ref_acc:.2f} ({ref_std:.2f}) / {ref_seconds:.2f}s"
        row["delta"] = f"{acc.mean * 100.0 - ref_acc:+.2f}"
    return row


def format_table(rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None) -> str:
    """고정폭 텍스트 표"""
    if not rows:
        return "(결과 없음)\n"
    columns = columns or list(rows[0].keys())
    widths = {c: max(len(c), *(len(str(r.get(c, ""))) for r in rows)) for c in columns}
    header = "  ".join(c.ljust(widths[c]) for c in columns)
    rule = "  ".join("-" * widths[c] for c in columns)
    body = ["  ".join(str(r.get(c, "")).ljust(widths[c]) for c in columns) for r in rows]
    return "\n".join([header, rule, *body]) + "\n"


def format_cv_table(results: Sequence[Any]) -> str:
    return format_table([cv_summary_row(r) for r in results])


def format_summary_document(document: Dict[str, Any]) -> str:
    """cv 가 남긴 summary JSON(dict)을 참조값과 함께 표로"""
    rows = []
    for entry in document.get("results", []):
        row = {
            "dataset": entry["dataset"],
            "components": entry["components"],
            "neurons": entry["neurons"],
            "variant": entry.get("variant", "multivariable"),
            "weights": entry.get("weights", "-"),
            "accuracy": format_mean_std(entry["accuracy_mean"], entry["accuracy_std"]),
            "seconds": f"{entry.get('seconds_mean', 0.0):.2f}",
            "reference": "-",
            "delta": "-",
        }
        reference = lookup_reference(entry["dataset"], entry["components"], entry["neurons"], row["variant"])
        if reference is not None:
            row["reference"] = f"{reference[0]:.2f} ({reference[1]:.2f}) / {reference[2]:.2f}s"
            row["delta"] = f"{entry['accuracy_mean'] * 100.0 - reference[0]:+.2f}"
        rows.append(row)
    return format_table(rows)


def format_check_results(results: Sequence[Any]) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"[{status}] {r.name}: max_error={r.max_error:.3e} tol={r.tolerance:g} samples={r.samples}"
        if r.detail:
            line += f" ({r.detail})"
        lines.append(line)
    passed = sum(1 for r in results if r.passed)
    lines.append(f"{passed}/{len(results)} 점검 통과")
    return "\n".join(lines) + "\n"


def format_model_info(model: Any) -> str:
    fm = model.feature_map
    lines = [
        f"d (클래스 수): {model.d}",
        f"특성 맵: p={fm.p}, L={fm.L}, {fm.variant.value} (가중치 {fm.size}개)",
        f"PCA: {'k=' + str(model.pca.k) + ', 입력 ' + str(model.pca.input_dim) + '차원' if model.pca else '없음'}",
        f"scale: {model.scale:g}",
        "결과 → 레이블:",
    ]
    assignment = model.assignment
    lines.append(f"  0 → {model.label_name(assignment.outcome_to_label[0])} (남은 클래스)")
    for m in range(model.d - 1, 0, -1):
        label = model.label_name(assignment.label_for_theta(m))
        lines.append(f"  {assignment.theta_to_outcome(m)} → {label} (θ_{m})")
    return "\n".join(lines) + "\n"


def format_distribution(dist: Any, report: Any) -> str:
    lines = [f"d={report.d}, qubit {report.d - 1}개"]
    for entry, p in enumerate(dist.entries):
        lines.append(f"  항목 {entry}: {p:.12f}")
    lines.append(f"  Invalid: {dist.invalid:.3e}")
    lines.append(f"제어 개수: {list(report.arities)} (합 {report.arity_sum})")
    lines.append(f"기본 게이트 추정: {report.elementary_estimate}")
    lines.append("주의: 모두 0 결과(항목 0)에 대한 비트 반전은 Invalid로 검출되지 않습니다")
    return "\n".join(lines) + "\n"
