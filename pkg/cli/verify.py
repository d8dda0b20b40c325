import hashlib
import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

import numpy as np
from tabulate import tabulate
from termcolor import colored
from tqdm import tqdm

from lie.chevalley import build_lie_basis, gauge_transform, sample_gauge
from lie.rootdata import RootSystemError, build_root_system, dual_partition_check, is_dominant_integral, pair, parse_label
from opers.miura import check_miura_image, dilate_connection, miura_transform, sample_connection
from opers.oper import (NotMember, OperOperator, classify_monodromy_free, dilate_oper, dilate_operator,
                        reduce_to_canonical, sample_operator, to_lambda_nilpotent)
from series import qchar
from series.formal import PrecisionError
import utils

PASS = "pass"
FAIL = "fail"
NOT_MEMBER = "not-member"
PRECISION_EXHAUSTED = "precision-exhausted"

STATUS_COLORS = {PASS: "green", FAIL: "red", NOT_MEMBER: "red", PRECISION_EXHAUSTED: "yellow"}

DILATION_SCALES = (2, -1, Fraction(1, 2), 3, Fraction(-2, 3))
SAMPLED_COWEIGHT_CAP = 3
FREUDENTHAL_DIMENSION_CAP = 5000

# config keys that define a run; json_out, num_workers and config_path do not change the report
REPORT_KEYS = ("type", "lambda", "lambda_max", "order", "precision", "gauge_precision", "working_precision", "bound",
               "seed", "miura_image_samples", "classify_samples", "gauge_samples", "dilation_samples",
               "closed_form_samples", "samples", "sample_rank_cap")

# per-kind sample counts; a non-null "samples" overrides all of them
SAMPLE_COUNT_KEYS = {
    "miura-image": "miura_image_samples",
    "classify": "classify_samples",
    "gauge-invariance": "gauge_samples",
    "dilation": "dilation_samples",
    "miura-closed-form": "closed_form_samples",
}


def classical_root_count(series, rank):
    counts = {"A": rank * (rank + 1) // 2, "B": rank * rank, "C": rank * rank, "D": rank * (rank - 1), "F": 24, "G": 6}
    return counts[series]


# ------------------------------------------------------------------ helpers
def _first_difference(a, b):
    """Lowest t-degree where two series differ within their common precision, None if they agree."""
    precision = [p for p in (a.precision, b.precision) if p is not None]
    degrees = sorted(set(a.terms()) | set(b.terms()))
    for n in degrees:
        if precision and n >= min(precision):
            break
        if a.coefficient(n) != b.coefficient(n):
            return n
    return None


def _compare_canonical(lhs, rhs):
    for j, (a, b) in enumerate(zip(lhs.coords, rhs.coords)):
        n = _first_difference(a, b)
        if n is not None:
            return FAIL, {"coordinate": j + 1, "first_divergence": n}
    return PASS, {}


def _sampled_coweight(rs, rng):
    return rs.coweight([int(c) for c in rng.integers(0, SAMPLED_COWEIGHT_CAP + 1, size=rs.rank)])


def _connection_precision(rs, coweight, case):
    # membership reads the twisted oper through t^(<theta, coweight + rho_check> + working_precision)
    top = max(rs.root_coweight_pairings(coweight + rs.rho_check))
    return max(case["precision"], int(top) + case["working_precision"] + 2)


# ------------------------------------------------------------------ runners
def _structure(rs, case):
    build_lie_basis(rs).verify()
    off = [i + 1 for i in range(rs.rank) if pair(rs.root(rs.simple_root_index(i)), rs.rho_check) != 1]
    if off:
        return FAIL, {"simple_roots_off_rho_check": off}
    expected = classical_root_count(*parse_label(rs.label))
    if rs.num_positive_roots != expected:
        return FAIL, {"positive_roots": rs.num_positive_roots, "expected": expected}
    if not dual_partition_check(rs):
        return FAIL, {"dual_partition": False}
    return PASS, {"positive_roots": rs.num_positive_roots, "exponents": list(rs.exponents)}


def _exponent_identity(rs, case):
    left = qchar.finite_product(sum(c) for c in rs.positive_coroots)
    right = qchar.finite_product(m for d in rs.exponents for m in range(1, d + 1))
    if qchar.exponent_identity_check(rs):
        return PASS, {"degree": left.order - 1}
    if left.order != right.order:
        return FAIL, {"degrees": [left.order - 1, right.order - 1]}
    return FAIL, {"first_divergence": left.first_difference(right)}


def _si_coh(rs, case):
    weight = rs.weight(case["weight"])
    order = case["order"]
    expected = qchar.char_z_reg(rs, weight, order)
    actual = qchar.q_dim(rs, weight, order) * qchar.char_V_a_minus(rs, order)
    if actual == expected:
        return PASS, {"order": order}
    return FAIL, {"first_divergence": expected.first_difference(actual)}


def _quotient(rs, case):
    weight = rs.weight(case["weight"])
    order = case["order"]
    expected = qchar.char_z_reg(rs, weight, order)
    actual = qchar.char_z_reg_via_quotient(rs, weight, order)
    if actual == expected:
        return PASS, {"order": order}
    return FAIL, {"first_divergence": expected.first_difference(actual)}


def _q_dim(rs, case):
    weight = rs.weight(case["weight"])
    poly = qchar.principal_dimension_polynomial(rs, weight)
    dimension = qchar.weyl_dimension(rs, weight)
    failed = []
    if poly != poly[::-1]:
        failed.append("palindromic")
    if sum(poly) != dimension:
        failed.append("weyl_dimension")
    if any(c < 0 for c in poly):
        failed.append("nonnegative")
    if dimension <= FREUDENTHAL_DIMENSION_CAP and qchar.principal_character_from_weights(rs, weight) != poly:
        failed.append("weight_multiplicities")
    if failed:
        return FAIL, {"failed_checks": failed}
    return PASS, {"dimension": dimension, "degree": len(poly) - 1}


def _miura_image(rs, case):
    rng = np.random.default_rng(case["seed"])
    coweight = _sampled_coweight(rs, rng)
    conn = sample_connection(rs, coweight, rng, precision=_connection_precision(rs, coweight, case))
    if check_miura_image(conn, coweight, case["working_precision"]):
        return PASS, {"coweight": coweight.to_json()}
    outcome = to_lambda_nilpotent(miura_transform(conn), coweight, case["working_precision"])
    if isinstance(outcome, NotMember):
        return NOT_MEMBER, {"coweight": coweight.to_json(), "degree": outcome.degree, "reason": outcome.reason}
    return FAIL, {"coweight": coweight.to_json(),
                  "nilpotent_residue": outcome.nilpotent_residue.to_json(build_lie_basis(rs))}


def _classify(rs, case):
    rng = np.random.default_rng(case["seed"])
    coweight = _sampled_coweight(rs, rng)
    conn = sample_connection(rs, coweight, rng, precision=_connection_precision(rs, coweight, case))
    recovered = classify_monodromy_free(miura_transform(conn), case["bound"], case["working_precision"])
    detail = {"expected": coweight.to_json(), "recovered": None if recovered is None else recovered.to_json()}
    return (PASS if recovered == coweight else FAIL), detail


def _miura_closed_form(rs, case):
    rng = np.random.default_rng(case["seed"])
    conn = sample_connection(rs, _sampled_coweight(rs, rng), rng, precision=case["precision"])
    u = conn.u[0]
    n = _first_difference(miura_transform(conn).coords[0], u * u + u.derivative())
    if n is None:
        return PASS, {}
    return FAIL, {"first_divergence": n}


def _non_member(rs, case):
    rng = np.random.default_rng(case["seed"])
    # residue +rho_check: the shifted residue is 0, never in the orbit of a regular dominant coweight
    conn = sample_connection(rs, -rs.rho_check, rng, precision=case["precision"])
    recovered = classify_monodromy_free(miura_transform(conn), case["bound"], case["working_precision"])
    if recovered is None:
        return PASS, {"bound": case["bound"]}
    return FAIL, {"recovered": recovered.to_json()}


def _gauge_invariance(rs, case):
    rng = np.random.default_rng(case["seed"])
    basis = build_lie_basis(rs)
    op = sample_operator(rs, rng, low=-1, high=3, precision=case["gauge_precision"])
    g = sample_gauge(basis, rng)
    moved = OperOperator.from_connection(rs, gauge_transform(basis, op.connection(), g))
    return _compare_canonical(reduce_to_canonical(op), reduce_to_canonical(moved))


def _dilation(rs, case):
    rng = np.random.default_rng(case["seed"])
    a = DILATION_SCALES[int(rng.integers(len(DILATION_SCALES)))]
    op = sample_operator(rs, rng)
    status, detail = _compare_canonical(reduce_to_canonical(dilate_operator(op, a)),
                                        dilate_oper(reduce_to_canonical(op), a))
    if status != PASS:
        return status, {"scale": str(a), "map": "reduce", **detail}
    conn = sample_connection(rs, _sampled_coweight(rs, rng), rng, precision=6, exact=True)
    status, detail = _compare_canonical(miura_transform(dilate_connection(conn, a)),
                                        dilate_oper(miura_transform(conn), a))
    if status != PASS:
        return status, {"scale": str(a), "map": "miura", **detail}
    return PASS, {"scale": str(a)}


RUNNERS = {
    "structure": _structure,
    "exponent-identity": _exponent_identity,
    "si-coh": _si_coh,
    "quotient": _quotient,
    "q-dim": _q_dim,
    "miura-image": _miura_image,
    "classify": _classify,
    "miura-closed-form": _miura_closed_form,
    "non-member": _non_member,
    "gauge-invariance": _gauge_invariance,
    "dilation": _dilation,
}

SAMPLED_KINDS = ("miura-image", "classify", "gauge-invariance", "dilation")


def run_case(case):
    """Runs one case; returns (result, seconds). Top level so a process pool can pickle it."""
    rs = build_root_system(case["type"])
    start = time.perf_counter()
    try:
        status, detail = RUNNERS[case["kind"]](rs, case)
    except PrecisionError as e:
        status, detail = PRECISION_EXHAUSTED, {"error": str(e)}
    except (ArithmeticError, AssertionError, ValueError) as e:
        status, detail = FAIL, {"error": f"{type(e).__name__}: {e}"}
    return {"key": case["key"], "kind": case["kind"], "status": status, "detail": detail}, time.perf_counter() - start


# ------------------------------------------------------------------- cases
def _parse_weight(value):
    if isinstance(value, int):
        return (value,)
    if isinstance(value, str):
        value = [v for v in value.strip("[]() ").split(",") if v.strip()]
    return tuple(int(v) for v in value)


def _weights(rs, config):
    if config["lambda"] is not None:
        grid = [_parse_weight(config["lambda"])]
    else:
        grid = itertools.product(range(config["lambda_max"] + 1), repeat=rs.rank)
    weights = []
    for coords in grid:
        if not is_dominant_integral(rs.weight(coords)):
            raise RootSystemError(f"Weight {list(coords)} is not dominant integral")
        weights.append(tuple(coords))
    return weights


def sample_count(config, kind):
    if config.get("samples") is not None:
        return config["samples"]
    return config[SAMPLE_COUNT_KEYS[kind]]


def build_cases(config):
    rs = build_root_system(config["type"])
    label = rs.label
    if config["order"] < 1:
        raise ValueError(f"Order must be positive, got {config['order']}")
    common = {"type": label, "order": config["order"], "precision": config["precision"],
              "gauge_precision": config["gauge_precision"], "working_precision": config["working_precision"],
              "bound": config["bound"]}

    cases = [dict(common, key=f"structure/{label}", kind="structure"),
             dict(common, key=f"exponent-identity/{label}", kind="exponent-identity")]
    for weight in _weights(rs, config):
        suffix = "(" + ",".join(str(c) for c in weight) + ")"
        for kind in ("si-coh", "quotient", "q-dim"):
            cases.append(dict(common, key=f"{kind}/{label}/{suffix}", kind=kind, weight=list(weight)))

    if rs.rank <= config["sample_rank_cap"]:
        kinds = SAMPLED_KINDS + (("miura-closed-form",) if label == "A1" else ())
        counts = {kind: sample_count(config, kind) for kind in kinds}
        seeds = iter(utils.child_seeds(config["seed"], sum(counts.values()) + 1))
        for kind in kinds:
            for i in range(counts[kind]):
                cases.append(dict(common, key=f"{kind}/{label}/{i:03d}", kind=kind, seed=next(seeds)))
        cases.append(dict(common, key=f"non-member/{label}", kind="non-member", seed=next(seeds)))
    return cases


# ------------------------------------------------------------------ report
def inputs_digest(config):
    echo = {k: config.get(k) for k in REPORT_KEYS}
    return hashlib.sha256(json.dumps(echo, sort_keys=True, default=str).encode()).hexdigest()


def exit_code(results):
    statuses = {r["status"] for r in results}
    if statuses & {FAIL, NOT_MEMBER}:
        return 1
    if PRECISION_EXHAUSTED in statuses:
        return 3
    return 0


def print_results(results, timings):
    rows = []
    for r in results:
        detail = json.dumps(r["detail"], cls=utils.SafeFallbackEncoder, sort_keys=True)
        rows.append([r["key"], colored(r["status"], STATUS_COLORS[r["status"]]), detail[:60],
                     f"{timings[r['key']]:.2f}s"])
    print(tabulate(rows, ["Case", "Status", "Detail", "Time"], tablefmt="pipe"), file=sys.stderr)


def run_verify(config):
    """Runs the acceptance suite for one root system; returns (report, exit code).

    The report is a pure function of the run-defining config keys, so equal
    seeds give byte-identical reports. Wall-clock timings only go to the console.
    """
    cases = build_cases(config)
    results, timings = [], {}
    if config.get("num_workers", 0) > 0:
        with ProcessPoolExecutor(max_workers=config["num_workers"]) as pool:
            outcomes = tqdm(pool.map(run_case, cases), total=len(cases), desc=config.get("run_name"))
            for result, seconds in outcomes:
                results.append(result)
                timings[result["key"]] = seconds
    else:
        for case in tqdm(cases, desc=config.get("run_name")):
            result, seconds = run_case(case)
            results.append(result)
            timings[result["key"]] = seconds
    results.sort(key=lambda r: r["key"])

    print_results(results, timings)
    summary = {status: sum(r["status"] == status for r in results) for status in STATUS_COLORS}
    print(f"{config.get('run_name')}: " + ", ".join(f"{v} {k}" for k, v in summary.items()), file=sys.stderr)

    report = {"command": {"name": "verify", **{k: config.get(k) for k in REPORT_KEYS}},
              "inputs_digest": inputs_digest(config),
              "seed": config["seed"],
              "cases": results,
              # per-case seconds only go to the stderr table
              "timing": {"num_cases": len(results), "per_case_seconds": "stderr"},
              "summary": summary}
    return report, exit_code(results)
