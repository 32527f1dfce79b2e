"""
Reproducible scenario runs.

Each scenario builds its example spaces, runs the constructions and records
one assertion per checked claim. A scenario passes when every assertion does.
"""

import logging
import math
from abc import ABC, abstractmethod
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Type

import numpy as np

from ..core.config import get_settings
from ..core.errors import CoarseToolkitError, ScenarioError
from ..filtration.profiles import (
    FiltrationProfile,
    kernel_stability_profile,
    pair_witness_distance,
    quotient_stability_profile,
    stabilisation_trend,
)
from ..filtration.sublevels import eq_sublevel, kernel_sublevel, quotient_graph, quotient_space
from ..filtration.zhang import zhang_table
from ..gallery.comb import CombFamily, CombRetractionFamily, comb, comb_retraction
from ..gallery.cubes import cubes_squares
from ..gallery.groups import (
    ball_growth,
    ball_sizes,
    commutator,
    enumerate_words_ball,
    heisenberg,
    heisenberg_cayley_ball,
    lattice_points,
    lattice_quotient,
    octahedral_size,
    word_lengths,
)
from ..gallery.random_spaces import random_instance, random_rips_instance
from ..glue.gluing import coarse_glue, coeq_space, double_glue_comparison
from ..graph_metric.weighted_graph import floyd_warshall_oracle, path_metric
from ..metric_core.controls import (
    AffineWitness,
    check_affine_upper,
    lipschitz_constant,
    min_affine_lower,
    surjectivity_radius,
)
from ..metric_core.products import product_linf
from ..metric_core.space import compose, format_point_id
from ..rips.augmented import augmented_rips
from ..rips.checks import check_ext_qi, check_image_qi, check_lower, realized_grid
from ..rips.maximal import DEFAULT_SLOPES, precedes_on_family, synthesize_maximal_metric
from ..rips.weights import ThetaKind, WeightFunction, doubling_certificate
from .reports import AssertionRecorder, ScenarioReport, write_report

logger = logging.getLogger(__name__)

# |B(R)| in the Heisenberg group for the generators a, b, z and their inverses
STORED_BALL_SIZES = {1: 7, 2: 29, 3: 83, 4: 189, 5: 379, 6: 697, 7: 1199, 8: 1953}


@dataclass
class ScenarioOutcome:
    data: Dict[str, Any] = field(default_factory=dict)
    profiles: List[FiltrationProfile] = field(default_factory=list)


def _scalar(value: Any, kind: type, scenario: str, key: str) -> Any:
    try:
        if kind is bool and isinstance(value, str):
            return value.lower() in ("1", "true", "yes")
        if kind is int and isinstance(value, float) and not value.is_integer():
            raise ScenarioError(f"parameter {key!r}: {value!r} is not an integer", scenario)
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"parameter {key!r}: cannot read {value!r} as {kind.__name__}", scenario) from exc


def coerce_param(value: Any, default: Any, scenario: str, key: str) -> Any:
    """Convert a CLI or API value to the type of the parameter's default."""
    if isinstance(default, tuple):
        items = value.split(",") if isinstance(value, str) else list(value)
        kind = type(default[0]) if default else float
        return tuple(_scalar(item, kind, scenario, key) for item in items if item != "")
    if default is None:
        return _scalar(value, int, scenario, key)
    return _scalar(value, type(default), scenario, key)


class Scenario(ABC):
    """Base class for scenarios."""

    name: str = ""
    anchor: str = ""
    summary: str = ""
    defaults: Dict[str, Any] = {}

    def resolve(self, overrides: Optional[Mapping[str, Any]] = None) -> Dict[str, Any]:
        """Defaults updated with `overrides`; unknown keys are rejected."""
        params = dict(self.defaults)
        for key, value in (overrides or {}).items():
            if key not in params:
                raise ScenarioError(
                    f"unknown parameter {key!r} (accepted: {', '.join(sorted(params)) or 'none'})",
                    self.name,
                )
            params[key] = coerce_param(value, params[key], self.name, key)
        scales = [params["sigma"]] if "sigma" in params else list(params.get("sigmas", ()))
        if any(not 0 < s < math.inf for s in scales):
            raise ScenarioError(f"sigma must be positive and finite, got {scales}", self.name)
        if "seed" in params and params["seed"] is None:
            params["seed"] = get_settings().default_seed
        return params

    @abstractmethod
    def run(self, params: Dict[str, Any], recorder: AssertionRecorder) -> ScenarioOutcome:
        """
        Run the scenario.

        Args:
            params: Resolved parameters.
            recorder: Receives one record per checked claim.

        Returns:
            Extra report data and any filtration profiles.
        """

    def execute(self, overrides: Optional[Mapping[str, Any]] = None) -> ScenarioReport:
        params = self.resolve(overrides)
        recorder = AssertionRecorder(self.name)
        logger.info("running scenario %s with %s", self.name, params)
        try:
            outcome = self.run(params, recorder)
        except CoarseToolkitError as exc:
            recorder.record(self.anchor, "completed", False, observed=f"{type(exc).__name__}: {exc}")
            outcome = ScenarioOutcome()
        return ScenarioReport(
            scenario=self.name,
            anchor=self.anchor,
            params=params,
            assertions=recorder.records,
            data=outcome.data,
            profiles=outcome.profiles,
        )

    def describe(self) -> Dict[str, Any]:
        return {"name": self.name, "anchor": self.anchor, "summary": self.summary, "defaults": self.defaults}


class CompositeScenario:
    """Runs several scenarios with their defaults."""

    def __init__(self, scenarios: List[Scenario]):
        self.scenarios = scenarios

    def execute(self) -> List[ScenarioReport]:
        return [scenario.execute() for scenario in self.scenarios]


SCENARIOS: Dict[str, Scenario] = {}


def register(cls: Type[Scenario]) -> Type[Scenario]:
    instance = cls()
    SCENARIOS[instance.name] = instance
    return cls


def get_scenario(name: str) -> Scenario:
    try:
        return SCENARIOS[name]
    except KeyError:
        raise ScenarioError(f"unknown scenario {name!r}; known: {', '.join(sorted(SCENARIOS))}", name) from None


def run_scenario(
    name: str,
    params: Optional[Mapping[str, Any]] = None,
    out_dir: Optional[Path] = None,
) -> ScenarioReport:
    """Run a registered scenario and, when `out_dir` is given, write its report files."""
    report = get_scenario(name).execute(params)
    if out_dir is not None:
        write_report(report, Path(out_dir))
    return report


def _strictly_increasing(values: List[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


@register
class CombQuotient(Scenario):
    name = "comb-Q"
    anchor = "comb-quotient-divergence"
    summary = "tooth tips glued at scale sigma+1 stay far apart at scale sigma; r(sigma, sigma+1) grows"
    defaults = {"n_max": 6, "sigma": 2, "n": 5, "family": (4, 6, 8, 10), "min_slope": 0.5}

    def run(self, params, recorder):
        sigma, n = params["sigma"], params["n"]
        c = comb(params["n_max"])
        v, w = c.locate_pair(sigma, n)
        pair = [format_point_id(v), format_point_id(w)]
        glued = quotient_space(c.f, sigma + 1).space.distance(v, w)
        apart = quotient_space(c.f, sigma).space.distance(v, w)
        bound = 2 * n / sigma
        recorder.record(self.anchor, "glued_at_next_scale", glued == 1, glued, 1, pair=pair)
        recorder.record(self.anchor, "apart_at_scale", apart >= bound, apart, bound, pair=pair)

        profiles, values = [], {}
        for instance in CombFamily(params["family"]).instances():
            profile = quotient_stability_profile(
                instance.maps["f"], [sigma, sigma + 1], instance.window, truncation_param=instance.param
            )
            profiles.append(profile)
            values[instance.param] = profile.value(sigma, sigma + 1)
        trend = stabilisation_trend(values)
        recorder.record(
            self.anchor, "distortion_grows", trend.slope >= params["min_slope"], trend.slope,
            params["min_slope"], values=values,
        )
        return ScenarioOutcome({"pair": pair, "trend": trend}, profiles)


@register
class CombKernel(Scenario):
    name = "comb-K"
    anchor = "comb-retraction-kernel-instability"
    summary = "the projection of the comb onto its ray has no stable kernel filtration"
    defaults = {"n_max": 6, "sigma": 2, "n": 5, "family": (4, 6, 8)}

    def run(self, params, recorder):
        sigma, n = params["sigma"], params["n"]
        retraction = comb_retraction(params["n_max"])
        f, c, s = retraction.f, retraction.comb, retraction.section
        v, w = c.locate_pair(sigma, n)
        pair = [format_point_id(v), format_point_id(w)]

        inside = kernel_sublevel(f, sigma + 1).contains(v, w)
        recorder.record(self.anchor, "pair_in_next_kernel", inside, inside, True, pair=pair)
        distance = float(pair_witness_distance(f, sigma, [(v, w)])[0])
        recorder.record(self.anchor, "pair_outside_neighbourhood", distance > n, distance, f"> {n}", pair=pair)

        ray = retraction.ray
        fs = compose(s, f)
        recorder.record(self.anchor, "section_right_inverse", np.array_equal(fs.assign, np.arange(ray.size)))
        isometric = np.array_equal(c.X.dist[np.ix_(s.assign, s.assign)], ray.dist)
        recorder.record(self.anchor, "section_isometric", isometric)
        lipschitz, witness = lipschitz_constant(f)
        recorder.record(self.anchor, "retraction_1_lipschitz", lipschitz <= 1, lipschitz, 1, pair=witness)

        tips = [(x, stage) for stage, teeth in enumerate(c.stages, start=1) for x in teeth]
        heights = c.X.dist[np.ix_(c.X.indices(tips), s.assign)].min(axis=1)
        expected = np.array([stage for _, stage in tips], dtype=float)
        recorder.record(self.anchor, "tip_distance_to_ray", np.array_equal(heights, expected))

        profiles, values = [], {}
        for instance in CombRetractionFamily(params["family"]).instances():
            profile = kernel_stability_profile(
                instance.maps["f"], [sigma, sigma + 1], instance.window, truncation_param=instance.param
            )
            profiles.append(profile)
            values[instance.param] = profile.value(sigma, sigma + 1)
        ordered = [values[p] for p in sorted(values)]
        recorder.record(self.anchor, "density_grows", _strictly_increasing(ordered), ordered, "strictly increasing")
        return ScenarioOutcome({"pair": pair, "trend": stabilisation_trend(values)}, profiles)


@register
class HeisenbergKernel(Scenario):
    name = "heisenberg-K"
    anchor = "heisenberg-kernel-stability"
    summary = "n(0, sigma) <= sigma for the projection H -> Z^2 on an interior ball"
    defaults = {"radius": 6, "grid": (0, 1, 2, 3)}

    def run(self, params, recorder):
        R, grid = params["radius"], params["grid"]
        z = commutator((1, 0, 0), (0, 1, 0))
        recorder.record(self.anchor, "commutator_is_central_generator", z == (0, 0, 1), z, (0, 0, 1))

        ball = heisenberg(R)
        window = ball.interior(max(R - max(grid), 0))
        profile = kernel_stability_profile(ball.f, grid, window, truncation_param=R)
        for tau in grid:
            value = profile.value(grid[0], tau)
            recorder.record(self.anchor, f"density_{grid[0]}_{tau}", value <= tau, value, tau,
                            witness=profile.record(grid[0], tau).witness)
        return ScenarioOutcome({"ball_size": ball.E.size, "window": window}, [profile])


@register
class HeisenbergGrowth(Scenario):
    name = "heisenberg-growth"
    anchor = "heisenberg-growth-rate"
    summary = "ball sizes of H, a brute-force word oracle, and growth faster than Z^3"
    defaults = {"max_radius": 8, "oracle_radius": 4, "fit_radii": (4, 5, 6, 7, 8), "min_gap": 0.3}

    def run(self, params, recorder):
        max_radius = params["max_radius"]
        sizes = ball_sizes(max_radius)
        for R, size in STORED_BALL_SIZES.items():
            if R <= max_radius:
                recorder.record(self.anchor, f"ball_size_{R}", sizes[R] == size, sizes[R], size)

        lengths = word_lengths(params["oracle_radius"])
        for R in range(1, params["oracle_radius"] + 1):
            bfs = {g for g, length in lengths.items() if length <= R}
            recorder.record(self.anchor, f"word_oracle_{R}", bfs == enumerate_words_ball(R), len(bfs))

        # each (x, y) of the Z^2 ball carries at least |x||y| + 2(R - |x| - |y|) + 1 elements
        bounds = {}
        for R in range(1, max_radius + 1):
            plane = lattice_points(2, R)
            area = int(np.abs(plane).prod(axis=1).sum())
            bounds[R] = octahedral_size(R) + area
        below = [R for R in bounds if sizes[R] < bounds[R]]
        recorder.record(self.anchor, "size_lower_bound", not below, sizes, bounds, violations=below)

        octahedra = {R: octahedral_size(R) for R in params["fit_radii"]}
        counted = {R: len(lattice_points(3, R)) for R in params["fit_radii"]}
        recorder.record(self.anchor, "octahedral_count", counted == octahedra, counted, octahedra)
        h_slope = ball_growth(sizes, params["fit_radii"])
        z_slope = ball_growth(octahedra)
        gap = h_slope - z_slope
        recorder.record(self.anchor, "faster_than_z3", gap > params["min_gap"], gap, params["min_gap"],
                        heisenberg_slope=h_slope, z3_slope=z_slope)
        return ScenarioOutcome({"ball_sizes": sizes})


@register
class CoequaliserSandwich(Scenario):
    name = "coeq-sandwich"
    anchor = "coequaliser-comparison"
    summary = "r, s between the double gluing and Coeq(f, g) on random instances"
    defaults = {"seed": None, "trials": 100}

    def run(self, params, recorder):
        failing = defaultdict(list)
        worst: Dict[str, float] = {}
        claimed: Dict[str, float] = {}
        for trial in range(params["trials"]):
            instance = random_instance(params["seed"] + trial)
            for check in double_glue_comparison(instance.f, instance.g).checks:
                claimed[check.name] = check.claimed
                worst[check.name] = max(worst.get(check.name, 0.0), check.observed)
                if not check.ok:
                    failing[check.name].append(instance.seed)
        for check_name in claimed:
            seeds = failing[check_name]
            recorder.record(self.anchor, check_name, not seeds, worst[check_name], claimed[check_name],
                            failures=len(seeds), failing_seeds=seeds[:5])
        return ScenarioOutcome({"trials": params["trials"]})


@register
class RipsConstants(Scenario):
    name = "rips-constants"
    anchor = "rips-factorisation-constants"
    summary = "explicit constants of X -> Q -> U -> Y_sigma -> Y on random instances"
    defaults = {"seed": None, "trials": 50, "thetas": ("exp2", "one")}

    def run(self, params, recorder):
        tallies: Dict[str, Dict[str, Any]] = {}

        def tally(key: str, ok: bool, observed: float, claimed: float, seed: int) -> None:
            entry = tallies.setdefault(key, {"failing": [], "worst": 0.0, "claimed": claimed, "runs": 0})
            entry["runs"] += 1
            entry["worst"] = max(entry["worst"], observed)
            if not ok:
                entry["failing"].append(seed)

        for trial in range(params["trials"]):
            instance = random_rips_instance(params["seed"] + trial)
            f, Y = instance.f, instance.Y
            sigma = Y.diameter
            grid = realized_grid(Y)
            for theta_name in params["thetas"]:
                theta = WeightFunction.from_name(theta_name)
                reports = {
                    "ext_qi": check_ext_qi(f, theta, sigma),
                    "image_qi": check_image_qi(f, theta, sigma),
                }
                if theta.dominates_identity(grid):
                    lipschitz, _ = lipschitz_constant(f)
                    reports["lower"] = check_lower(f, theta, AffineWitness(float(math.ceil(lipschitz)), 0.0))
                if theta.kind is ThetaKind.EXP2:
                    r = surjectivity_radius(f)
                    certificate = doubling_certificate(theta, r, grid)
                    bound = 2.0 ** (2 * r)
                    tally(f"{theta_name}:doubling_constant", certificate.C <= bound, certificate.C, bound,
                          instance.seed)
                for group, report in reports.items():
                    for check in report.checks:
                        tally(f"{theta_name}:{group}:{check.name}", check.ok, check.observed, check.claimed,
                              instance.seed)

        for key in sorted(tallies):
            entry = tallies[key]
            recorder.record(self.anchor, key, not entry["failing"], entry["worst"], entry["claimed"],
                            runs=entry["runs"], failing_seeds=entry["failing"][:5])
        return ScenarioOutcome({"trials": params["trials"]})


@register
class CubesWindow(Scenario):
    name = "cubes-window"
    anchor = "cubes-coarse-not-quasi-isometric"
    summary = "n^3 -> n^2 is 1-Lipschitz while every affine lower offset diverges with the window"
    defaults = {"windows": (10, 50, 100, 200), "slopes": (1.0, 0.5, 0.1)}

    def run(self, params, recorder):
        offsets: Dict[float, List[float]] = {float(a): [] for a in params["slopes"]}
        for N in params["windows"]:
            cs = cubes_squares(N)
            upper = check_affine_upper(cs.f, AffineWitness(1.0, 0.0))
            recorder.record(self.anchor, f"upper_1_0_N{N}", upper.ok, upper.excess, 0, pair=upper.worst_pair)
            for fit in min_affine_lower(cs.f, params["slopes"]):
                offsets[float(fit.slope)].append(fit.offset)
        for a, values in offsets.items():
            recorder.record(self.anchor, f"lower_offset_diverges_a{a:g}", _strictly_increasing(values), values,
                            "strictly increasing")
        return ScenarioOutcome({"windows": params["windows"], "offsets": offsets})


@register
class ZhangProjection(Scenario):
    name = "zhang-projection"
    anchor = "zhang-projection-witness"
    summary = "delta(epsilon) = epsilon for the projection Z^k -> Z^m with R = 0"
    defaults = {"k": 2, "m": 1, "N": 5, "R": 0.0}

    def run(self, params, recorder):
        quotient = lattice_quotient(params["k"], params["m"], params["N"])
        f = quotient.f
        epsilons = [float(e) for e in quotient.Y.realized_distances() if e <= params["N"]]
        table = zhang_table(f, params["R"], epsilons, quotient.zhang_window)
        for result in table:
            recorder.record(
                self.anchor, f"delta_eps{result.epsilon:g}", result.feasible and result.delta == result.epsilon,
                result.delta, result.epsilon, window_size=result.window_size, pair=result.pair,
            )
        grid = [0.0] + epsilons
        profile = kernel_stability_profile(f, grid, truncation_param=params["N"])
        densities = [profile.value(0.0, tau) for tau in grid]
        recorder.record(self.anchor, "kernel_densities_finite", all(np.isfinite(densities)), densities)
        return ScenarioOutcome({"table": table}, [profile])


@register
class MaximalMetricComb(Scenario):
    name = "maximal-metric-comb"
    anchor = "comb-maximal-metric"
    summary = "the augmented Rips metric on the comb and the order between d_Y and d_X"
    defaults = {"family": (4, 6, 8), "sigmas": (2.0, 3.0), "theta": "exp2", "slopes": DEFAULT_SLOPES}

    def run(self, params, recorder):
        theta = WeightFunction.from_name(params["theta"])
        instances = list(CombFamily(params["family"]).instances())
        trends, results = {}, {}
        for sigma in params["sigmas"]:
            ratios = {}
            for instance in instances:
                result = synthesize_maximal_metric(instance.maps["f"], theta, sigma, params["slopes"])
                results[f"n{instance.param}_s{sigma:g}"] = result
                failed = [c.name for checks in result.arrows.values() for c in checks if not c.ok]
                recorder.record(self.anchor, f"factorisation_n{instance.param}_s{sigma:g}", result.ok, failed, [])
                ratios[instance.param] = result.max_ratio
            ordered = [ratios[p] for p in sorted(ratios)]
            recorder.record(self.anchor, f"ratio_grows_s{sigma:g}", _strictly_increasing(ordered), ordered,
                            "strictly increasing", sigma=sigma)
            trends[f"{sigma:g}"] = stabilisation_trend(ratios)

        forward = [(i.param, i.maps["f"].target, i.maps["f"].source) for i in instances]
        backward = [(i.param, i.maps["f"].source, i.maps["f"].target) for i in instances]
        y_by_x = precedes_on_family(forward, params["slopes"])
        x_by_y = precedes_on_family(backward, params["slopes"])
        recorder.record(self.anchor, "d_Y_precedes_d_X", y_by_x.consistent, y_by_x.witness, True)
        recorder.record(self.anchor, "converse_diverges", not x_by_y.consistent, x_by_y.divergence_slope, "> 0")
        return ScenarioOutcome({
            "ratio_trends": trends,
            "d_Y_by_d_X": y_by_x,
            "d_X_by_d_Y": x_by_y,
            "results": results,
        })


@register
class DefinitionalChecks(Scenario):
    name = "definitional-checks"
    anchor = "definitional-cross-checks"
    summary = "kernel vs equaliser, Q_0 vs the Cayley graph, path metrics vs Floyd-Warshall"
    defaults = {
        "n_max": 3,
        "sigma": 2.0,
        "radius": 6,
        "seed": None,
        "family": (4, 6, 8, 10),
        "scales": (2.0, 3.0),
        "cayley_radii": (3, 4),
    }

    def run(self, params, recorder):
        retraction = comb_retraction(params["n_max"])
        f, sigma = retraction.f, params["sigma"]
        product = product_linf(f.source, f.source)
        equaliser = eq_sublevel(compose(product.first, f), compose(product.second, f), sigma).space
        kernel = kernel_sublevel(f, sigma).as_space()
        same = kernel.points == equaliser.points and np.array_equal(kernel.dist, equaliser.dist)
        recorder.record(self.anchor, "kernel_is_equaliser", same, kernel.size, equaliser.size)

        R = params["radius"]
        ball = heisenberg(R)
        quotient = quotient_space(ball.f, 0).space
        cayley = path_metric(heisenberg_cayley_ball(R), name="cayley")
        rows = ball.interior(R // 3).indices
        cayley_rows = cayley.indices([ball.E.points[i] for i in rows])
        agree = np.array_equal(quotient.dist[np.ix_(rows, rows)], cayley.dist[np.ix_(cayley_rows, cayley_rows)])
        recorder.record(self.anchor, "q0_is_cayley_graph", agree, int(rows.size))

        limit = get_settings().oracle_max_vertices
        graphs, skipped = self._scenario_graphs(params), []
        for label, graph in graphs:
            if graph.order > limit:
                skipped.append(label)
                continue
            equal = np.array_equal(path_metric(graph).dist, floyd_warshall_oracle(graph))
            recorder.record(self.anchor, f"oracle_{label}", equal, graph.order)
        if skipped:
            logger.info("oracle skipped %d graphs above %d vertices: %s", len(skipped), limit, skipped)
        return ScenarioOutcome({"oracle_skipped": skipped})

    @staticmethod
    def _scenario_graphs(params):
        """Every weighted graph the other scenarios build at their default parameters."""
        limit = get_settings().oracle_max_vertices
        for n in params["family"]:
            c = comb(n)
            yield f"comb_n{n}", c.graph
            if c.X.size > limit:
                continue
            for sigma in params["scales"]:
                yield f"comb_quotient_n{n}_s{sigma:g}", quotient_graph(c.f, sigma)
        for R in params["cayley_radii"]:
            yield f"heisenberg_cayley_R{R}", heisenberg_cayley_ball(R)
        coequaliser = random_instance(params["seed"])
        yield "coarse_glue", coarse_glue(coequaliser.f, coequaliser.g).graph
        yield "coequaliser", coeq_space(coequaliser.f, coequaliser.g).graph
        rips_instance = random_rips_instance(params["seed"])
        for theta in (WeightFunction.exp2(), WeightFunction.one()):
            for sigma in sorted({2.0, float(rips_instance.Y.diameter)}):
                rips = augmented_rips(rips_instance.f, theta, sigma)
                yield f"augmented_rips_{theta.kind.value}_s{sigma:g}", rips.graph
