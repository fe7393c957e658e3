import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import config
from config.types import NumericOptions

# Configure logging
logging.basicConfig(
    level=getattr(logging, config.common.LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)

# Re-export the library surface so command code imports from one place
from coactionkit import (  # noqa: E402
    UnsupportedConfigurationError,
    a_jk_consistency,
    admissible_charts,
    blowup_pullback,
    box_coaction,
    bubble_period,
    prefactor_identity,
    triangle_coaction,
    weight_collapse_residual,
    weight_graded_dims,
)
from coactionkit.triangle import massless_geometry  # noqa: E402
from graphfile import InputError, parse_graph_file, parse_kinematics_file  # noqa: E402
from graphkin import FeynmanGraph, KinematicPoint, validate_generic  # noqa: E402
from griffiths import homogeneous_check, picard_fuchs_B, reduce_to_boxes  # noqa: E402
from numeval import NegativeRadicandError, ow_box_value, parametric_quadrature  # noqa: E402
from relations import RelationSet, reduce_box_dilogs, triangle_face_relation  # noqa: E402
from reporting import AlgebraicValue, DecimalValue  # noqa: E402
from symanzik import alias_substitutions, build_integrand, symanzik  # noqa: E402

BUILTIN_PREFIX = "builtin:"


def load_graph(source: str) -> FeynmanGraph:
    """
    Load a graph from "builtin:<name>" or a graph file path.

    Raises:
        InputError: For unknown built-in names and unreadable files
        GraphError: For structurally invalid graphs
    """
    if source.startswith(BUILTIN_PREFIX):
        name = source[len(BUILTIN_PREFIX) :]
        if name not in config.graphs:
            raise InputError(f"unknown built-in graph {name!r}; available: {', '.join(config.graphs.names())}")
        return config.graphs[name]
    return parse_graph_file(_read(source))


def load_point(source: Optional[str], g: FeynmanGraph) -> Optional[KinematicPoint]:
    """Load a kinematic point from "uniform" or a file of `set` lines."""
    if source is None:
        return None
    if source == "uniform":
        return KinematicPoint.uniform(g)
    return parse_kinematics_file(_read(source), g)


def _read(source: str) -> str:
    try:
        return Path(source).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"cannot read {source}: {e.strerror or e}")


def require_point(p: Optional[KinematicPoint], purpose: str) -> KinematicPoint:
    if p is None:
        raise InputError(f"{purpose} needs a kinematic point (--kinematics)")
    return p


def decimal(value, precision: int = 15) -> DecimalValue:
    return DecimalValue.from_mp(value, precision)


def check(name: str, provenance: str, passed: bool, **details: Any) -> Dict[str, Any]:
    """One verification outcome as a report entry."""
    return {"name": name, "provenance": provenance, "passed": bool(passed), **details}


def genericity(g: FeynmanGraph, p: KinematicPoint) -> Dict[str, Any]:
    report = validate_generic(g, p)
    return {"passed": report.passed, "euclidean": report.euclidean, "violations": list(report.violations)}


def symanzik_report(g: FeynmanGraph) -> Dict[str, Any]:
    pair = symanzik(g)
    return {
        "graph": g.name,
        "edges": g.edge_count,
        "loop_number": g.loop_number,
        "psi": pair.psi.as_expr(),
        "phi": pair.phi.as_expr(),
        "xi": pair.xi.as_expr(),
        "phi_aliased": symanzik(g, display_aliases=True).phi.as_expr(),
        "aliases": {symbol.name: expansion for symbol, expansion in alias_substitutions(g).items()},
    }


def _coaction_terms(coaction) -> Dict[str, Any]:
    return {
        "graph": coaction.graph_name,
        "term_count": len(coaction.terms),
        "terms": [
            {
                "motivic": term.motivic.render(),
                "derham": term.derham.render(),
                "weight": list(term.weight),
                "provenance": term.provenance,
                "flags": list(term.flags),
            }
            for term in coaction.terms
        ],
        "markers": list(coaction.markers),
        "definitions": {symbol.name: value for symbol, value in coaction.definitions.items()},
        "notes": list(coaction.notes),
    }


def coaction_report(g: FeynmanGraph, p: Optional[KinematicPoint]) -> Dict[str, Any]:
    """
    Coaction of a box or a triangle, or the period of a bubble.

    Raises:
        UnsupportedConfigurationError: For graphs with another edge count
    """
    if g.edge_count == 4:
        return _coaction_terms(box_coaction(g, p))
    if g.edge_count == 3:
        return _coaction_terms(triangle_coaction(g, p))
    if g.edge_count == 2:
        variant = "theta1" if len(g.massive_edges) == 2 else "theta2"
        period = bubble_period(g, variant)
        values = p.substitutions(g) if p is not None else None
        report: Dict[str, Any] = {
            "graph": g.name,
            "variant": variant,
            "chart": list(period.chart),
            "prefactor": period.prefactor.resolved(),
            "argument": period.argument.resolved(),
        }
        if values is not None:
            report["prefactor"] = period.prefactor.subs(values).resolved()
            report["argument"] = period.argument.subs(values).resolved()
        return report
    raise UnsupportedConfigurationError(f"no coaction for {g.name} with {g.edge_count} edges")


def _quadrature_methods(method: str, variables: int) -> List[str]:
    if method == "both":
        return ["adaptive", "mc"]
    if method == "auto":
        return ["adaptive" if variables <= 3 else "mc"]
    return [method]


def _closed_form(g: FeynmanGraph, p: KinematicPoint, dimension: int, dps: int) -> Optional[Dict[str, Any]]:
    if dimension == 4 and g.edge_count == 2:
        # ∫ Ω / Ψ² over the 1-simplex
        return {"provenance": "bubble-d4", "value": decimal(1, dps)}
    if dimension == 2 and g.edge_count == 2 and len(g.massive_edges) == 2:
        value = bubble_period(g, "theta1").root_form_value(p.substitutions(g), dps)
        return {"provenance": "bubble-root-form", "value": decimal(value.real, dps)}
    if dimension == 4 and g.edge_count == 4 and len(g.massive_edges) == 4:
        evaluation = ow_box_value(g, p, dps)
        return {
            "provenance": "box-clausen-sum",
            "value": decimal(evaluation.value, evaluation.precision),
            "literal_value": decimal(evaluation.literal_value, evaluation.precision),
            "normalization": evaluation.normalization,
            "clausen_count": evaluation.clausen_count,
        }
    return None


def eval_report(g: FeynmanGraph, p: KinematicPoint, options: NumericOptions, dimension: int) -> Dict[str, Any]:
    """Quadrature of the parametric integral, with a closed form where one is known."""
    ig = build_integrand(g, dimension)
    report: Dict[str, Any] = {
        "graph": g.name,
        "dimension": dimension,
        "integrand": ig.render(),
        "genericity": genericity(g, p),
    }
    if ig.divergent:
        report["divergent"] = ig.divergence_reason or "divergent"
        return report

    results = []
    for method in _quadrature_methods(options.method, g.edge_count - 1):
        result = parametric_quadrature(ig, p, method=method, budget=options.budget, seed=options.seed)
        entry: Dict[str, Any] = {
            "method": result.method,
            "value": decimal(result.value),
            "error_estimate": decimal(result.error_estimate),
            "samples": result.samples,
        }
        if result.seed is not None:
            entry["seed"] = result.seed
        results.append((result, entry))
    report["quadrature"] = [entry for _, entry in results]

    try:
        closed = _closed_form(g, p, dimension, options.precision)
    except NegativeRadicandError as e:
        logger.warning(f"{g.name}: closed form unavailable at this point: {e}")
        report["closed_form_note"] = str(e)
        closed = None
    if closed is not None:
        report["closed_form"] = closed
        reference = float(closed["value"].to_mp())
        report["agreement"] = [
            {
                "method": result.method,
                "relative_difference": decimal(result.relative_error(reference)),
                "within_tolerance": result.relative_error(reference)
                <= max(options.tolerance, 5 * result.error_estimate / abs(reference)),
            }
            for result, _ in results
        ]
    return report


def _box_checks(g: FeynmanGraph, p: KinematicPoint, options: NumericOptions) -> List[Dict[str, Any]]:
    checks = []
    residuals = prefactor_identity(g, p)
    checks.append(
        check(
            "prefactor-identity",
            "box-coaction face prefactors",
            all(r == 0 for r in residuals),
            residuals=residuals,
        )
    )
    collapse = weight_collapse_residual()
    checks.append(check("dilog-weight-collapse", "Im Li2 coaction", collapse == 0, residual=collapse))

    faces = a_jk_consistency(g, p, dps=max(options.precision, config.common.DERIVATIVE_PRECISION))
    pairs = [
        {
            "pair": f"{face.pair[0]},{face.pair[1]}",
            "exact": decimal(face.exact),
            "formula": decimal(face.formula),
            "sheet": face.sheet,
            "expected": decimal(face.expected),
            "residual": decimal(face.residual),
            "passed": face.passed,
        }
        for face in faces
    ]
    checks.append(
        check(
            "face-coefficients",
            "box-primitive face coefficients",
            all(face.passed for face in faces),
            normalization=config.common.BOX_NORMALIZATION,
            pairs=pairs,
        )
    )

    data = picard_fuchs_B(g, None, p)
    checks.append(
        check("exterior-identity", "box Picard-Fuchs primitive", data.identity_exact, B=data.B, param=data.param)
    )
    homogeneous = homogeneous_check(g, None, p, dps=options.precision)
    checks.append(
        check(
            "homogeneous-equation",
            "box Picard-Fuchs prefactor equation",
            homogeneous.resolved_sign is not None,
            resolved=homogeneous.resolved_sign or "none",
            residual_plus=decimal(homogeneous.residual_plus),
            residual_minus=decimal(homogeneous.residual_minus),
        )
    )
    return checks


def verify_report(g: FeynmanGraph, p: Optional[KinematicPoint], options: NumericOptions) -> Dict[str, Any]:
    """
    Run the exact and numeric checks that apply to the graph.

    Raises:
        UnsupportedConfigurationError: For graphs without checks
    """
    report: Dict[str, Any] = {"graph": g.name}
    checks: List[Dict[str, Any]] = []
    if g.edge_count == 4 and len(g.massive_edges) == 4:
        p = require_point(p, f"verifying {g.name}")
        report["genericity"] = genericity(g, p)
        checks.extend(_box_checks(g, p, options))
    elif g.edge_count == 3 and len(g.massive_edges) == 0:
        geometry = massless_geometry(g)
        p = require_point(p, f"verifying {g.name}")
        comparison = geometry.compare(p.substitutions(g), options.precision)
        # disagreement with the closed expressions is reported, not failed
        report["geometry"] = {
            key: value if isinstance(value, bool) else decimal(value)
            for key, value in sorted(comparison.items())
        }
        for chart in admissible_charts(g):
            pullback = blowup_pullback(g, chart)
            checks.append(
                check(
                    f"chart {chart}",
                    "massless-triangle blow-up",
                    pullback.certified,
                    denominator_exponent=pullback.denominator_exponent,
                )
            )
    elif g.edge_count == 3 and len(g.massive_edges) < 3:
        for chart in admissible_charts(g):
            pullback = blowup_pullback(g, chart)
            checks.append(
                check(
                    f"chart {chart}",
                    "triangle blow-up",
                    pullback.certified,
                    denominator_exponent=pullback.denominator_exponent,
                    order_xi=pullback.order_xi,
                )
            )
    else:
        raise UnsupportedConfigurationError(f"no verification checks for {g.name}")
    report["checks"] = checks
    return report


def reduce_report(g: FeynmanGraph, p: KinematicPoint, options: NumericOptions) -> Dict[str, Any]:
    """Reduction to boxes, checked by quadrature."""
    method = "auto" if options.method == "both" else options.method
    result = reduce_to_boxes(g, p, check=True, method=method, budget=options.budget, seed=options.seed)
    report: Dict[str, Any] = {
        "graph": g.name,
        "coefficients": {"{" + ",".join(key) + "}": value for key, value in result.sorted_items()},
        "remainder": [
            {
                "contracted": ",".join(sorted(term.contracted)),
                "coefficient": term.coefficient,
                "xi_power": term.xi_power,
                "variables": term.variables,
            }
            for term in result.remainder
        ],
    }
    checks = []
    if result.relative_residual is not None:
        report["graph_value"] = decimal(result.graph_value)
        report["reduced_value"] = decimal(result.reduced_value)
        report["relative_residual"] = decimal(result.relative_residual)
        checks.append(
            check(
                "reduction-residual",
                "reduction to boxes",
                result.relative_residual <= config.common.REDUCTION_TOLERANCE,
            )
        )
    report["checks"] = checks
    return report


def relation_set_report(relations: RelationSet) -> Dict[str, Any]:
    return {
        "labels": list(relations.labels),
        "basis": [relations.labels[i] for i in relations.argument_basis],
        "basis_size": relations.basis_size,
        "relations": [[int(v) for v in row] for row in relations.relations],
        "confirmation": [decimal(residual) for residual in relations.confirmation],
        "precision": relations.precision,
    }


def relations_report(family: str, g: Optional[FeynmanGraph], options: NumericOptions) -> Dict[str, Any]:
    """Integer relations of a log family, with the checks the family is expected to pass."""
    dps = max(options.precision, config.common.RELATION_PRECISION)
    if family == "triangle-faces":
        relations = triangle_face_relation(
            g or config.graphs.triangle, seed=options.seed, dps=dps, max_coeff=options.max_coeff, held_out=options.held_out
        )
        report = {"family": family, **relation_set_report(relations)}
        report["checks"] = [
            check("relation-count", "triangle face periods", len(relations.relations) == 1)
        ]
        return report

    reduction = reduce_box_dilogs(
        g or config.graphs.box, seed=options.seed, dps=dps, max_coeff=options.max_coeff, held_out=options.held_out
    )
    sizes = (reduction.motivic.basis_size, reduction.derham.basis_size)
    report = {
        "family": family,
        "input_terms": reduction.input_terms,
        "motivic_basis_size": sizes[0],
        "derham_basis_size": sizes[1],
        "survivors": [
            {"term": term.render(), "coefficient": AlgebraicValue(expr=term.coefficient)}
            for term in reduction.terms
        ],
        "reference_ratios": {label: ratio for label, ratio in reduction.reference_ratios.items()},
        "notes": list(reduction.notes),
    }
    report["checks"] = [
        check("basis-sizes", "box Clausen family bases", sizes == (27, 20), expected="27/20"),
        check("survivors", "box Clausen family reduction", reduction.survivor_count == 6, found=reduction.survivor_count),
    ]
    return report


def graded_report(n: int, vanishing: Optional[int]) -> Dict[str, Any]:
    dims = weight_graded_dims(n, vanishing)
    report: Dict[str, Any] = {"n": n, "dims": list(dims)}
    if vanishing is not None:
        report["vanishing"] = vanishing
    return report
