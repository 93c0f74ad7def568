import logging
from dataclasses import dataclass
from typing import Dict, Optional, Sequence

from src.core.errors import DomainError, FragmentViolation, ToolkitError, UsageError
from src.core.formula import Language, Sort, Var, constants, free_variables
from src.core.normal_form import SignStratum
from src.core.rational import format_rational, parse_rational, v2_denominator
from src.services import dlo_service
from src.services.acceptance_service import build_services, run_acceptance
from src.services.interior_service import Certificate, NonelementarityResult, OpenCoreResult
from src.services.wmso_service import parameter_bound
from src.utils.formatters import format_rnf, format_set, format_verdict, interval_union_records, print_formula
from src.utils.formula_parser import parse_formula, parse_term_value
from src.utils.schemas import (
    CertificateReport, CommandRecord, IntervalPartRecord, NonelementarityReport, OpenCoreReport,
    RnfRecord, RunConfig,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_FRAGMENT = 2
EXIT_USAGE = 64

COMMANDS = ("qe", "cells", "rho", "fiber", "witness", "rnf", "eval", "interior", "omin", "nonelem", "selftest")


@dataclass
class CommandOutcome:
    status: int
    record: CommandRecord
    text: str


def _point_text(point: Dict[Var, object]) -> Dict[str, str]:
    return {
        v.name: (format_set(x) if v.sort == Sort.SET else format_rational(x))
        for v, x in sorted(point.items(), key=lambda item: item[0].name)
    }


def certificate_report(certificate: Certificate) -> CertificateReport:
    return CertificateReport(
        point=_point_text(certificate.point),
        depth=certificate.depth,
        found=certificate.found,
        witnesses=[
            {"k": k, "point": _point_text(point), "labels": {v.name: format_set(l) for v, l in labels.items()}}
            for k, point, labels in certificate.witnesses
        ],
        failed_at=certificate.failed_at,
    )


def open_core_report(result: OpenCoreResult) -> OpenCoreReport:
    return OpenCoreReport(
        is_open=result.is_open,
        variable=result.variable.name,
        interior=print_formula(result.interior),
        description=[IntervalPartRecord(**r) for r in interval_union_records(result.description)],
        witness=None if result.witness is None else format_rational(result.witness),
        certificate=None if result.certificate is None else certificate_report(result.certificate),
        fibers={format_rational(c): fiber.to_strings() for c, fiber in result.fibers.items()},
    )


def nonelementarity_report(result: NonelementarityResult, max_bits: int) -> NonelementarityReport:
    return NonelementarityReport(
        bound=result.bound,
        witness=result.witness.label(max_bits),
        fiber_size=result.fiber_size,
        complement_components=result.complement_components,
    )


class CommandHandler:
    """One handle_* method per subcommand; each returns (result, evidence, text)"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.coding, self.wmso, self.rnf, self.interior = build_services(config)

    def run(self, command: str, args: Dict[str, object]) -> CommandOutcome:
        """Dispatch and turn toolkit errors into exit statuses"""
        inputs = {k: v for k, v in args.items() if v is not None}
        try:
            if command not in COMMANDS:
                raise UsageError(f"unknown command {command!r}")
            handler = getattr(self, f"handle_{command}")
            result, evidence, text = handler(**inputs)
            status = EXIT_OK
            if command == "selftest" and not all(r["passed"] for r in result):
                status = EXIT_DOMAIN
        except UsageError as e:
            return self._failure(command, inputs, EXIT_USAGE, "usage", e)
        except FragmentViolation as e:
            return self._failure(command, inputs, EXIT_FRAGMENT, "fragment", e)
        except (DomainError, ToolkitError) as e:
            return self._failure(command, inputs, EXIT_DOMAIN, "domain", e)
        record = CommandRecord(command=command, input=_jsonable(inputs), result=result, evidence=evidence)
        return CommandOutcome(status, record, text)

    def _failure(self, command: str, inputs: Dict, status: int, kind: str, error: Exception) -> CommandOutcome:
        logger.debug("%s failed: %s", command, error)
        record = CommandRecord(command=command, input=_jsonable(inputs),
                               result=None, evidence={"error": kind, "message": str(error)})
        return CommandOutcome(status, record, format_verdict(False, f"{kind} error: {error}"))

    # ------------------------------------------------------------ order

    def handle_qe(self, formula: str, language: str = "order"):
        if language == "wmso":
            f = parse_formula(formula, Language.WMSO)
            result = self.wmso.eliminate_w(f)
            within = constants(result) <= parameter_bound(f)
            return print_formula(result), {"parameters_in_E": within}, print_formula(result)
        f = parse_formula(formula)
        result = dlo_service.eliminate_quantifiers(f)
        agrees = dlo_service.equivalent_on_cells(f, result) if free_variables(f) else \
            dlo_service.evaluate_order(f, {}) == dlo_service.evaluate_qf(result, {})
        return print_formula(result), {"cell_check": agrees}, print_formula(result)

    def handle_cells(self, formula: str, variables: Optional[str] = None):
        f = parse_formula(formula)
        names = variables.split(",") if variables else sorted(v.name for v in free_variables(f))
        qf = dlo_service.eliminate_quantifiers(f)
        params = sorted(constants(f) | constants(qf))
        cells = dlo_service.decompose_to_cells(qf, names, params)
        lines = [str(cell) for cell in cells]
        evidence = {
            "total_cells": len(dlo_service.enumerate_cells(names, params)),
            "formula": print_formula(dlo_service.cells_formula(cells)),
        }
        if len(names) == 1:
            union = dlo_service.describe_unary(f)
            evidence["description"] = interval_union_records(union)
            lines.append(f"= {union}")
        return [str(cell) for cell in cells], evidence, "\n".join(lines) or "no cells"

    # ------------------------------------------------------------ coding

    def handle_rho(self, value: str):
        x = parse_rational(value)
        values = self.coding.rho(x)
        index = v2_denominator(x)
        return values.to_strings(), {"index": index}, format_set(values)

    def handle_fiber(self, value: str):
        x = parse_rational(value)
        values = self.coding.fiber(x)
        return values.to_strings(), {}, format_set(values)

    def handle_witness(self, bound: int):
        if bound < 0:
            raise UsageError("witness needs a nonnegative bound")
        code = self.coding.unbounded_fiber_witness(bound)
        fiber = self.coding.code_fiber(code)
        label = code.label(self.coding.max_code_bits)
        result = {"witness": label, "exponent": code.exponent, "fiber_size": len(fiber)}
        return result, {"fiber": fiber.to_strings()}, f"{label} fiber_size={len(fiber)}"

    # ------------------------------------------------------------ normal forms and evaluation

    def handle_rnf(self, formula: str):
        f = parse_formula(formula)
        variables = sorted(free_variables(f), key=lambda v: v.name)
        records, blocks = [], []
        for stratum in SignStratum.all_for(variables):
            rnf = self.rnf.to_rnf(f, stratum)
            records.append(RnfRecord(
                stratum=str(stratum),
                disjuncts=[{"chi": print_formula(chi), "theta": print_formula(theta)} for chi, theta in rnf.disjuncts],
            ).model_dump())
            blocks.append(format_rnf(rnf))
        return records, {"strata": len(records)}, "\n".join(blocks)

    def handle_eval(self, formula: str, assignments: Sequence[str] = (), language: str = "order-A"):
        f = parse_formula(formula, language)
        point = self._parse_point(assignments, f)
        if Language(language) == Language.WMSO:
            value = self.wmso.eval_wformula(f, point)
            evidence = {"reference": self.wmso.vs_evaluate(f, point)}
        else:
            value = self.rnf.evaluate_point(f, point)
            evidence = {"reference": self.rnf.evaluate_semantic(f, point)}
        return value, evidence, format_verdict(value, "true" if value else "false")

    @staticmethod
    def _parse_point(assignments: Sequence[str], f) -> Dict[Var, object]:
        by_name = {v.name: v for v in free_variables(f)}
        point: Dict[Var, object] = {}
        for item in assignments:
            if "=" not in item:
                raise UsageError(f"expected name=value, got {item!r}")
            name, text = item.split("=", 1)
            if name not in by_name:
                raise UsageError(f"{name} is not a free variable of the formula")
            point[by_name[name]] = parse_term_value(text)
        return point

    # ------------------------------------------------------------ interiors

    def handle_interior(self, formula: str, method: str = "cells"):
        f = parse_formula(formula)
        result = self.interior.interior_formula(f, method=method)
        text = print_formula(result)
        return text, {"method": method}, text

    def handle_omin(self, formula: str):
        f = parse_formula(formula)
        report = open_core_report(self.interior.open_core_check(f))
        lines = [
            format_verdict(report.is_open, "open" if report.is_open else "not open"),
            f"interior: {report.interior}",
            "description: " + (", ".join(_part_text(p) for p in report.description) or "∅"),
        ]
        if report.witness is not None:
            lines.append(f"witness: {report.witness}")
        for c, fiber in report.fibers.items():
            lines.append(f"fiber of {c}: {{{', '.join(fiber)}}}")
        return report.model_dump(), {}, "\n".join(lines)

    def handle_nonelem(self, bound: int, table: bool = False):
        if bound < 0:
            raise UsageError("nonelem needs a nonnegative bound")
        results = self.interior.finite_satisfiability_table(bound) if table else [self.interior.nonelementarity_report(bound)]
        reports = [nonelementarity_report(r, self.coding.max_code_bits) for r in results]
        lines = [
            f"N={r.bound} witness={r.witness} fiber_size={r.fiber_size} components={r.complement_components}"
            for r in reports
        ]
        payload = [r.model_dump() for r in reports]
        return (payload if table else payload[0]), {"reports": len(reports)}, "\n".join(lines)

    # ------------------------------------------------------------ acceptance

    def handle_selftest(self, scale: float = 1.0):
        results = run_acceptance(self.config, scale)
        lines = [format_verdict(r.passed, f"{r.name}: {r.cases} cases, {r.failures} failures, {r.seconds}s  {r.detail}")
                 for r in results]
        return [r.model_dump() for r in results], {"scale": scale}, "\n".join(lines)


def _part_text(part: IntervalPartRecord) -> str:
    if part.kind == "point":
        return "{" + part.endpoints[0] + "}"
    return f"({part.endpoints[0]}, {part.endpoints[1]})"


def _jsonable(inputs: Dict[str, object]) -> Dict[str, object]:
    return {k: (list(v) if isinstance(v, (list, tuple)) else v) for k, v in inputs.items()}
