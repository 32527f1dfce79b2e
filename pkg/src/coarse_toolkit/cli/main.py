"""
Command-line entry point.

Pipeline subcommands pass bundles of spaces and maps as JSON; `scenario` runs
a registered scenario and writes its report files.

    coarse-toolkit space gen comb --n-max 5 | coarse-toolkit qfilt - --map f --sigma 2,3
    coarse-toolkit scenario comb-Q --n-max 6 --out reports
"""

import argparse
import json
import logging
import sys
from io import StringIO
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from ..core.config import ToolkitSettings, configure, get_settings
from ..core.errors import CoarseToolkitError, SchemaError
from ..core.logging_setup import setup_logging
from ..filtration.profiles import (
    default_sigma_grid,
    kernel_stability_profile,
    quotient_stability_profile,
    write_profiles_csv,
)
from ..gallery.comb import CombFamily, CombRetractionFamily
from ..gallery.cubes import CubesFamily
from ..gallery.groups import HeisenbergFamily, LatticeQuotientFamily
from ..gallery.random_spaces import random_instance, random_rips_instance
from ..glue.gluing import coarse_glue, coeq_space, double_glue_comparison
from ..metric_core.checks import check_metric
from ..metric_core.controls import classify_map, surjectivity_radius
from ..metric_core.space import INF
from ..rips.augmented import augmented_rips
from ..rips.checks import check_ext_qi, check_image_qi
from ..rips.maximal import DEFAULT_SLOPES, precedes_on_family
from ..rips.weights import WeightFunction
from .bundles import Bundle, read_bundle
from .reports import atomic_write_text, to_jsonable, write_report
from .scenarios import SCENARIOS, CompositeScenario, get_scenario, run_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _float_list(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _emit(payload: Any, out: Optional[str]) -> None:
    text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n"
    if out:
        atomic_write_text(Path(out), text)
    else:
        sys.stdout.write(text)


def _emit_text(text: str, out: Optional[str]) -> None:
    if out:
        atomic_write_text(Path(out), text)
    else:
        sys.stdout.write(text)


def _load(args: argparse.Namespace, path: str) -> Bundle:
    bundle = read_bundle(path)
    if args.exact:
        bundle.require_integral()
    return bundle


GENERATORS: Dict[str, Callable[[argparse.Namespace], Dict[str, Any]]] = {
    "comb": lambda a: CombFamily([a.n_max]).generate(a.n_max).to_bundle(),
    "comb-retract": lambda a: CombRetractionFamily([a.n_max]).generate(a.n_max).to_bundle(),
    "heisenberg": lambda a: HeisenbergFamily([a.radius]).generate(a.radius).to_bundle(),
    "cubes": lambda a: CubesFamily([a.window]).generate(a.window).to_bundle(),
    "lattice": lambda a: LatticeQuotientFamily([a.window], k=a.k, m=a.m).generate(a.window).to_bundle(),
}


def cmd_space_gen(args: argparse.Namespace) -> int:
    if args.kind == "random-coeq":
        instance = random_instance(args.seed)
        payload = Bundle({"A": instance.A, "X": instance.X}, {"f": instance.f, "g": instance.g}).to_dict()
    elif args.kind == "random-rips":
        instance = random_rips_instance(args.seed)
        payload = Bundle({"X": instance.X, "Y": instance.Y}, {"f": instance.f}).to_dict()
    else:
        payload = GENERATORS[args.kind](args)
    _emit(payload, args.out)
    return EXIT_OK


def cmd_space_load(args: argparse.Namespace) -> int:
    bundle = _load(args, args.bundle)
    summary = {
        "spaces": {
            name: {
                "size": space.size,
                "integral": space.integral,
                "diameter": space.diameter,
                "metric": check_metric(space),
            }
            for name, space in bundle.spaces.items()
        },
        "maps": {name: {"surjectivity_radius": surjectivity_radius(f)} for name, f in bundle.maps.items()},
        "windows": {name: window for name, window in bundle.windows.items()},
    }
    _emit(summary, args.out)
    return EXIT_OK


def cmd_glue(args: argparse.Namespace) -> int:
    bundle = _load(args, args.bundle)
    result = coarse_glue(bundle.map(args.f), bundle.map(args.g))
    _emit({"space": result.space, "graph": result.graph}, args.out)
    return EXIT_OK


def cmd_coeq(args: argparse.Namespace) -> int:
    bundle = _load(args, args.bundle)
    f, g = bundle.map(args.f), bundle.map(args.g)
    result = coeq_space(f, g)
    comparison = double_glue_comparison(f, g)
    _emit({
        "space": result.space,
        "graph": result.graph,
        "closeness": result.closeness,
        "comparison": comparison,
    }, args.out)
    return EXIT_OK if comparison.ok else EXIT_FAILED


def _profile_command(builder) -> Callable[[argparse.Namespace], int]:
    def run(args: argparse.Namespace) -> int:
        bundle = _load(args, args.bundle)
        f = bundle.map(args.map)
        grid = args.sigma if args.sigma else default_sigma_grid(f)
        profile = builder(f, grid, bundle.window(args.window), args.truncation_param)
        stream = StringIO()
        write_profiles_csv([profile], stream)
        _emit_text(stream.getvalue(), args.out)
        return EXIT_OK

    return run


def cmd_rips(args: argparse.Namespace) -> int:
    bundle = _load(args, args.bundle)
    f = bundle.map(args.map)
    theta = WeightFunction.from_name(args.theta)
    sigma = args.sigma[0] if args.sigma else INF
    rips = augmented_rips(f, theta, sigma)
    payload: Dict[str, Any] = {"rips": rips, "space": rips.space}
    if sigma < INF:
        payload["ext_qi"] = check_ext_qi(f, theta, sigma)
    payload["image_qi"] = check_image_qi(f, theta, sigma)
    _emit(payload, args.out)
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    bundle = _load(args, args.bundle)
    _emit(classify_map(bundle.map(args.map), args.slopes), args.out)
    return EXIT_OK


def cmd_precedes(args: argparse.Namespace) -> int:
    family = []
    for position, path in enumerate(args.bundles, start=1):
        bundle = _load(args, path)
        family.append((float(position), bundle.space(args.d), bundle.space(args.d_prime)))
    _emit(precedes_on_family(family, args.slopes), args.out)
    return EXIT_OK


SCENARIO_FLAGS = {"n_max": "n_max", "sigma": "sigma", "radius": "radius", "window": "windows", "seed": "seed"}


def _scenario_params(args: argparse.Namespace, defaults: Dict[str, Any]) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for flag, key in SCENARIO_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            params[key] = value
    if "sigma" in params and "sigma" not in defaults and "sigmas" in defaults:
        params["sigmas"] = (params.pop("sigma"),)
    if args.theta is not None:
        params["theta" if "theta" in defaults else "thetas"] = args.theta
    for item in args.set or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise SchemaError(f"expected key=value, got {item!r}", "")
        params[key.strip().replace("-", "_")] = value
    return params


def cmd_scenario(args: argparse.Namespace) -> int:
    out_dir = Path(args.out or get_settings().output_dir)
    if args.name == "all":
        reports = CompositeScenario(list(SCENARIOS.values())).execute()
        for report in reports:
            write_report(report, out_dir)
            print(f"{report.scenario}: {'pass' if report.ok else 'fail'}")
        return EXIT_OK if all(report.ok for report in reports) else EXIT_FAILED
    params = _scenario_params(args, get_scenario(args.name).defaults)
    report = run_scenario(args.name, params, out_dir)
    for record in report.assertions:
        if not record.ok:
            print(f"FAIL {record.anchor}/{record.name}: observed {record.observed}, expected {record.expected}")
    print(f"{report.scenario}: {'pass' if report.ok else 'fail'} ({len(report.assertions)} assertions)")
    return report.exit_code


def _format_default(value: Any) -> str:
    if isinstance(value, tuple):
        return ",".join(str(item) for item in value)
    return str(value)


def cmd_scenarios(args: argparse.Namespace) -> int:
    for name in sorted(SCENARIOS):
        info = SCENARIOS[name].describe()
        defaults = ", ".join(f"{key}={_format_default(value)}" for key, value in info["defaults"].items())
        print(f"{name:22s} {info['anchor']:36s} {info['summary']}")
        if args.verbose:
            print(f"{'':22s} defaults: {defaults}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON settings file")
    common.add_argument("--log-level", help="logging level (default from settings)")
    common.add_argument("--exact", action="store_true", help="refuse spaces with non-integral distances")
    common.add_argument("--out", help="output file (or directory for scenarios); stdout when omitted")

    parser = argparse.ArgumentParser(prog="coarse-toolkit", description="Coarse geometry of finite metric spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    space = sub.add_parser("space", help="generate or inspect bundles")
    space_sub = space.add_subparsers(dest="space_command", required=True)
    gen = space_sub.add_parser("gen", parents=[common], help="generate an example bundle")
    gen.add_argument("kind", choices=sorted(GENERATORS) + ["random-coeq", "random-rips"])
    gen.add_argument("--n-max", type=int, default=5)
    gen.add_argument("--radius", type=int, default=3)
    gen.add_argument("--window", type=int, default=10, help="truncation N for cubes and lattice")
    gen.add_argument("--k", type=int, default=2)
    gen.add_argument("--m", type=int, default=1)
    gen.add_argument("--seed", type=int)
    gen.set_defaults(handler=cmd_space_gen)
    load = space_sub.add_parser("load", parents=[common], help="validate a bundle and summarise it")
    load.add_argument("bundle")
    load.set_defaults(handler=cmd_space_load)

    for name, handler, help_text in (
        ("glue", cmd_glue, "coarse gluing of two maps with a common source"),
        ("coeq", cmd_coeq, "coequaliser of two parallel maps and its comparison checks"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("bundle")
        p.add_argument("--f", default="f")
        p.add_argument("--g", default="g")
        p.set_defaults(handler=handler)

    for name, builder in (("kfilt", kernel_stability_profile), ("qfilt", quotient_stability_profile)):
        p = sub.add_parser(name, parents=[common], help=f"{name[0]}-filtration stability profile as CSV")
        p.add_argument("bundle")
        p.add_argument("--map", default="f")
        p.add_argument(
            "--sigma", type=_float_list, help="comma-separated increasing grid (realized distances up to sigma_cap)"
        )
        p.add_argument("--window", help="name of a window in the bundle")
        p.add_argument("--truncation-param", type=float)
        p.set_defaults(handler=_profile_command(builder))

    rips = sub.add_parser("rips", parents=[common], help="augmented weighted Rips metric and its checks")
    rips.add_argument("bundle")
    rips.add_argument("--map", default="f")
    rips.add_argument("--theta", choices=["exp2", "one", "linear"], default="exp2")
    rips.add_argument("--sigma", type=_float_list, help="scale (infinite when omitted)")
    rips.set_defaults(handler=cmd_rips)

    classify = sub.add_parser("classify", parents=[common], help="mono/epi witnesses for a map")
    classify.add_argument("bundle")
    classify.add_argument("--map", default="f")
    classify.add_argument("--slopes", type=_float_list, default=list(DEFAULT_SLOPES))
    classify.set_defaults(handler=cmd_classify)

    precedes = sub.add_parser("precedes", parents=[common], help="d <= a d' + b across truncation bundles")
    precedes.add_argument("bundles", nargs="+")
    precedes.add_argument("--d", required=True, help="space holding the metric d")
    precedes.add_argument("--d-prime", required=True, help="space holding the metric d'")
    precedes.add_argument("--slopes", type=_float_list, default=list(DEFAULT_SLOPES))
    precedes.set_defaults(handler=cmd_precedes)

    scenario = sub.add_parser("scenario", parents=[common], help="run a registered scenario")
    scenario.add_argument("name", help="scenario name, or 'all'")
    scenario.add_argument("--n-max", type=int)
    scenario.add_argument("--sigma", type=float)
    scenario.add_argument("--radius", type=int)
    scenario.add_argument("--window", help="comma-separated windows")
    scenario.add_argument("--theta")
    scenario.add_argument("--seed", type=int)
    scenario.add_argument("--set", action="append", metavar="KEY=VALUE", help="any other scenario parameter")
    scenario.set_defaults(handler=cmd_scenario)

    listing = sub.add_parser("scenarios", parents=[common], help="list registered scenarios")
    listing.add_argument("--verbose", "-v", action="store_true", help="also print default parameters")
    listing.set_defaults(handler=cmd_scenarios)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    try:
        if args.config:
            configure(ToolkitSettings.from_file(args.config))
        setup_logging(args.log_level or get_settings().log_level)
        return int(args.handler(args))
    except SchemaError as exc:
        print(f"error: schema violation at {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CoarseToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
