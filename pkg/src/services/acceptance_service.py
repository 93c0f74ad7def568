import logging
import random
import time
from itertools import combinations
from typing import Callable, List, Tuple

from src.core.cell import IntervalUnion
from src.core.errors import AnchorLimitExceeded, FragmentViolation
from src.core.finite_set import FiniteSetQ
from src.core.formula import FALSE, A, Lt, Not, Var, ZERO, constants, disj, free_variables, walk
from src.core.rational import Rational
from src.services import dlo_service
from src.services.coding_service import CodingService
from src.services.interior_service import InteriorService
from src.services.rnf_service import RnfService
from src.services.wmso_service import (
    WmsoService, parameter_bound, s_preimage, set_intersection, set_max, set_min, set_union,
)
from src.utils import corpus
from src.utils.schemas import CheckResult, RunConfig

logger = logging.getLogger(__name__)

Outcome = Tuple[int, int, str]


def build_services(config: RunConfig) -> Tuple[CodingService, WmsoService, RnfService, InteriorService]:
    coding = CodingService()
    wmso = WmsoService(anchor_limit=config.anchor_limit)
    rnf = RnfService(coding, wmso)
    interior = InteriorService(coding, wmso, rnf, certificate_depth=config.depth)
    return coding, wmso, rnf, interior


def _sized(count: int, scale: float) -> int:
    return max(1, int(count * scale))


def _run(name: str, check: Callable[[], Outcome]) -> CheckResult:
    started = time.perf_counter()
    cases, failures, detail = check()
    seconds = time.perf_counter() - started
    result = CheckResult(name=name, passed=failures == 0, cases=cases, failures=failures,
                         seconds=round(seconds, 3), detail=detail)
    logger.info("%s: %d cases, %d failures in %.2fs", name, cases, failures, seconds)
    return result


class AcceptanceSuite:
    """The acceptance checks at a chosen scale; scale 1 runs the full sizes"""

    def __init__(self, config: RunConfig, scale: float = 1.0):
        self.config = config
        self.scale = scale
        self.coding, self.wmso, self.rnf, self.interior = build_services(config)

    def rng(self, offset: int) -> random.Random:
        return random.Random(self.config.seed + offset)

    def coding_density(self) -> Outcome:
        rng = self.rng(1)
        cases = failures = 0
        for n in range(64):
            for _ in range(_sized(200, self.scale)):
                width = Rational(rng.randint(1, 10 ** 6), 10 ** 6)
                b = -Rational(rng.randint(0, (10 ** 6 - 1) * 1000), 1000)
                a = b - width
                x = self.coding.find_code_in_interval(n, a, b)
                cases += 1
                if not (a < x < b and self.coding.rho(x) == self.coding.set_of_index(n)):
                    failures += 1
        return cases, failures, "codes land inside every interval with the requested fiber"

    def fiber_bounds(self) -> Outcome:
        rng = self.rng(2)
        cases = failures = 0
        for _ in range(_sized(500, self.scale)):
            x = -Rational(rng.randint(1, 10 ** 4), rng.randint(1, 2 ** 16))
            cases += 1
            if not isinstance(self.coding.fiber(x), FiniteSetQ):
                failures += 1
        for n in range(65):
            cases += 1
            if len(self.coding.code_fiber(self.coding.unbounded_fiber_witness(n))) <= n:
                failures += 1
        return cases, failures, "fibers finite; witness fibers exceed every N up to 64"

    def order_elimination(self) -> Outcome:
        cases = failures = 0
        for f in corpus.order_corpus(self.config.seed + 3, _sized(500, self.scale)):
            qf = dlo_service.eliminate_quantifiers(f)
            variables = [Var("x1"), Var("x2")]
            params = sorted(constants(f) | constants(qf) | {Rational(0)})
            for cell in dlo_service.enumerate_cells(variables, params):
                rep = cell.representative()
                cases += 1
                if dlo_service.evaluate_order(f, rep) != dlo_service.evaluate_qf(qf, rep):
                    failures += 1
                    logger.warning("elimination disagrees on %s at %s", f, cell)
        return cases, failures, "eliminated formulas agree with sampling evaluation on every cell"

    def cell_count(self) -> Outcome:
        cells = dlo_service.enumerate_cells(2, [Rational(0)])
        grid = [Rational(v) for v in (-2, -1, 0, 1, 2)]
        sign = lambda a, b: (a > b) - (a < b)
        brute = {(sign(a, 0), sign(b, 0), sign(a, b)) for a in grid for b in grid}
        failures = int(len(cells) != 13) + int(len(brute) != 13)
        return 2, failures, f"{len(cells)} cells, {len(brute)} weak orders"

    def normal_form_soundness(self) -> Outcome:
        cases = failures = skipped = 0
        points = corpus.sample_points(self.config.seed + 5, _sized(100, self.scale), [Var("x"), Var("y")])
        for f in corpus.order_a_corpus(self.config.seed + 5, _sized(200, self.scale)):
            free = free_variables(f)
            for point in points:
                local = {v: point[v] for v in free}
                try:
                    via_rnf = self.rnf.evaluate_point(f, local)
                except (FragmentViolation, AnchorLimitExceeded) as e:
                    skipped += 1
                    logger.warning("normal form undecided on %s: %s", f, e)
                    break
                cases += 1
                if via_rnf != self.rnf.evaluate_semantic(f, local):
                    failures += 1
                    logger.warning("normal form disagrees on %s at %s", f, local)
        return cases + skipped, failures + skipped, f"{skipped} formulas left undecided"

    def wmso_agreement(self) -> Outcome:
        cases = failures = skipped = 0
        for f, env in corpus.wmso_corpus(self.config.seed + 6, _sized(500, self.scale)):
            try:
                closed = self.wmso.instantiate(f, {v: env[v] for v in free_variables(f)})
                eliminated = self.wmso.eliminate_w(closed)
                decided = dlo_service.evaluate_qf(eliminated, {})
                reference = self.wmso.vs_evaluate(closed, {})
            except (FragmentViolation, AnchorLimitExceeded) as e:
                skipped += 1
                logger.warning("set elimination undecided on %s: %s", f, e)
                continue
            cases += 1
            if decided != reference or not constants(eliminated) <= parameter_bound(closed):
                failures += 1
                logger.warning("set elimination disagrees on %s with %s", f, env)
        return cases + skipped, failures + skipped, f"{skipped} formulas left undecided"

    def interior_pipeline(self) -> Outcome:
        x, y = Var("x"), Var("y")
        cases = failures = 0
        expected = [
            (A(x, y), FALSE),
            (Not(A(x, y)), disj(Lt(ZERO, x), Lt(y, ZERO))),
        ]
        for f, target in expected:
            for method in ("cells", "qe"):
                interior = self.interior.interior_formula(f, method=method)
                cases += 1
                if any(isinstance(node, A) for node in walk(interior)) or \
                        not dlo_service.equivalent_on_cells(interior, target, [x, y]):
                    failures += 1
                    logger.warning("interior of %s by %s is %s", f, method, interior)
            for point in corpus.sample_points(self.config.seed + 7, _sized(1000, self.scale), [x, y]):
                cases += 1
                inside = dlo_service.evaluate_order(target, point)
                if inside != self.interior.is_interior_point(f, point):
                    failures += 1
                    continue
                if not inside:
                    certificate = self.interior.non_interior_certificate(f, point, self.config.depth)
                    failures += int(not certificate.found)
        return cases, failures, "Int(A) empty; Int(not A) = {x>0} ∪ {y<0}"

    def open_core(self) -> Outcome:
        cases = failures = 0
        y = Var("y")
        rng = self.rng(8)
        for f in corpus.open_unary_catalogue(self.config.seed + 8, _sized(50, self.scale), y):
            report = self.interior.open_core_check(f)
            cases += 1
            if not report.is_open or not isinstance(report.description, IntervalUnion):
                failures += 1
                logger.warning("catalogue formula %s reported not open", f)
                continue
            for _ in range(_sized(1000, self.scale)):
                value = Rational(rng.randint(-40, 40), rng.choice([1, 2, 3, 4, 8]))
                if value < 0 and rng.random() < 0.5:
                    label = FiniteSetQ.of(rng.sample([Rational(1), Rational(1, 2), Rational(2)], rng.randint(0, 2)))
                    value = self.coding.find_labelled(label, value - Rational(1, 16), min(value + Rational(1, 16), Rational(0)))
                cases += 1
                point = {y: value} if free_variables(f) else {}
                if report.description.contains(value) != self.rnf.evaluate_point(f, point):
                    failures += 1
        return cases, failures, "open catalogue described by finite unions of points and intervals"

    def nonelementarity(self) -> Outcome:
        failures = 0
        table = self.interior.finite_satisfiability_table(64)
        for report in table:
            if report.fiber_size <= report.bound or report.complement_components != report.fiber_size + 1:
                failures += 1
        return len(table), failures, "complement components = fiber size + 1 for N ≤ 64"

    def set_algebra(self) -> Outcome:
        universe = [Rational(1, 2), Rational(1), Rational(2), Rational(3)]
        subsets = [FiniteSetQ.of(c) for size in range(5) for c in combinations(universe, size)]
        cases = failures = 0
        for s in subsets:
            items = sorted(s)
            cases += 2
            failures += int(set_min(s) != FiniteSetQ.of(items[:1]))
            failures += int(set_max(s) != FiniteSetQ.of(items[-1:]))
            for t in subsets:
                successor = {a: min((b for b in items if b > a), default=None) for a in items}
                preimage = FiniteSetQ.of(a for a in items if successor[a] is not None and successor[a] in t)
                cases += 3
                failures += int(s_preimage(s, t) != preimage)
                failures += int(set(set_union(s, t)) != set(s) | set(t))
                failures += int(set(set_intersection(s, t)) != set(s) & set(t))
        empty = FiniteSetQ.of([])
        failures += int(set_min(empty) != empty) + int(set_max(empty) != empty)
        return cases + 2, failures, f"{len(subsets)} subsets checked exhaustively"

    def run(self) -> List[CheckResult]:
        checks = [
            ("coding-density", self.coding_density),
            ("fiber-bounds", self.fiber_bounds),
            ("order-elimination", self.order_elimination),
            ("cell-count", self.cell_count),
            ("normal-form-soundness", self.normal_form_soundness),
            ("wmso-agreement", self.wmso_agreement),
            ("interior-pipeline", self.interior_pipeline),
            ("open-core", self.open_core),
            ("nonelementarity", self.nonelementarity),
            ("set-algebra", self.set_algebra),
        ]
        return [_run(name, check) for name, check in checks]


def run_acceptance(config: RunConfig, scale: float = 1.0) -> List[CheckResult]:
    return AcceptanceSuite(config, scale).run()
