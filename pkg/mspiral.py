# Copyright 2022 Huawei Technologies Co., Ltd
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ============================================================================

"""m-spiral command line: pole, centers, pfib, verify, fit, render, synth."""

import dataclasses
import json
import logging
import sys

from model_utils.config import get_config
from src.errors import UsageError
from src.fitting import fit_spiral, load_samples_csv, synth_samples
from src.render import LAYERS, RenderOptions, Stroke, emit_centers_csv, emit_pfib_csv, emit_samples_csv, render_svg
from src.sections import p_fibonacci_table
from src.spiral import Point, make_spec, pole_closed, pole_iterative
from src.verify import DEFAULT_GRID, run_suite

logger = logging.getLogger("mspiral")

POLE_DIGITS = 15


def _parse_floats(text, what):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"{what} must be comma separated numbers, got {text!r}") from None


def _parse_point(text, what="point"):
    values = _parse_floats(text, what)
    if len(values) != 2:
        raise UsageError(f"{what} must be given as x,y, got {text!r}")
    return Point(*values)


def _parse_styles(text):
    styles = {}
    for entry in filter(None, (e.strip() for e in text.split(";"))):
        parts = entry.split(":")
        if len(parts) not in (3, 4) or parts[0] not in LAYERS:
            raise UsageError(f"style must be layer:color:width[:dash/dash], got {entry!r}")
        try:
            width = float(parts[2])
            dash = tuple(float(d) for d in parts[3].split("/")) if len(parts) == 4 else None
        except ValueError:
            raise UsageError(f"style width and dashes must be numbers, got {entry!r}") from None
        styles[parts[0]] = Stroke(parts[1], width, dash)
    return styles


def _spec(config):
    return make_spec(config.m, config.L, _parse_point(config.origin, "origin"))


def _emit(text, config):
    if config.out:
        with open(config.out, "w", newline="") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _fmt(point):
    return f"({point.x:.{POLE_DIGITS}g},{point.y:.{POLE_DIGITS}g})"


def run_pole(config):
    spec = _spec(config)
    lines = []
    if config.method in ("closed", "both"):
        lines.append(f"closed: {_fmt(pole_closed(spec).point)}")
    if config.method in ("iterative", "both"):
        pole = pole_iterative(spec, config.tol, config.max_iterations)
        lines.append(f"iterative: {_fmt(pole.point)} steps={pole.iterations} residual={pole.residual:.3e}")
    _emit("\n".join(lines) + "\n", config)
    return 0


def run_centers(config):
    _emit(emit_centers_csv(_spec(config), config.max_i), config)
    return 0


def run_pfib(config):
    _emit(emit_pfib_csv(p_fibonacci_table(config.p_max, config.root_tol)), config)
    return 0


def run_verify(config):
    grid = _parse_floats(config.grid, "grid") if config.grid.strip() else DEFAULT_GRID
    report = run_suite(grid, config.L, config.max_i, config.tol, config.max_iterations,
                       workers=config.workers or None)
    _emit(report.to_json(), config)
    return 0 if report.all_passed else 1


def run_fit(config):
    init_pole = _parse_point(config.init_pole, "init_pole") if config.init_pole.strip() else None
    samples = load_samples_csv(config.input if config.input else sys.stdin)
    result = fit_spiral(samples, init_pole=init_pole, init_m=config.init_m or None,
                        max_backstep=config.max_backstep, max_iterations=config.max_simplex_iterations,
                        strict=config.strict, harmonics=config.harmonics)
    _emit(json.dumps(dataclasses.asdict(result), indent=2) + "\n", config)
    return 0


def run_render(config):
    opts = RenderOptions(width_px=config.width_px, height_px=config.height_px,
                         margin_fraction=config.margin_fraction,
                         layers=frozenset(filter(None, (s.strip() for s in config.layers.split(",")))),
                         styles=_parse_styles(config.styles), arcs_as_polyline=config.arcs_as_polyline,
                         samples_per_arc=config.samples_per_arc,
                         pole_ratios=_parse_floats(config.pole_ratios, "pole_ratios"), viewport=config.viewport)
    _emit(render_svg(_spec(config), config.n_squares, opts, config.max_squares), config)
    return 0


def run_synth(config):
    samples = synth_samples(_spec(config), config.n_points, config.noise_sigma, config.seed,
                            n_squares=config.n_squares or None)
    _emit(emit_samples_csv(samples), config)
    return 0


COMMANDS = {
    "pole": run_pole,
    "centers": run_centers,
    "pfib": run_pfib,
    "verify": run_verify,
    "fit": run_fit,
    "render": run_render,
    "synth": run_synth,
}


def cli_main(argv=None):
    """
    Run one subcommand. Returns the process exit code.
    """
    try:
        config = get_config(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 0
    except (OSError, ValueError) as e:
        print(f"mspiral: error: {e}", file=sys.stderr)
        return 1
    logging.basicConfig(level=config.log_level, stream=sys.stderr, force=True,
                        format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    logger.debug("configuration:\n%s", config)
    try:
        return COMMANDS[config.command](config)
    except UsageError as e:
        print(f"mspiral: error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as e:
        # SpiralError and the pandas parser errors are ValueErrors
        print(f"mspiral: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(cli_main())
