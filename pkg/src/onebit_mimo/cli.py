"""The ``simulate`` command line: presets, overrides, and result emission.

Precedence for every setting: command-line flag, then config-file value,
then preset default. The fig2 preset runs the error-floor sweep over user
counts; everything else runs a BER-versus-SNR sweep.
"""

import argparse
import sys
from dataclasses import dataclass

from .channel import SystemConfig, noise_power_from_snr_db
from .errors import OneBitMimoError, UsageError
from .montecarlo import TrialPlan, ber_sweep, error_floor_sweep
from .receivers import ReceiverKind
from .results import emit_results

_ALL_KINDS = tuple(ReceiverKind)
_FIG_SNR_GRID = tuple(float(s) for s in range(-10, 31, 5))
_FIG2_USER_COUNTS = (2, 4, 6, 8, 10, 12, 14, 16)
# AQNM-MMSE and WFQ floors sit above ZF/MMSE and are left out of the
# error-floor preset.
_FIG2_KINDS = tuple(
    kind
    for kind in ReceiverKind
    if kind not in (ReceiverKind.AQNM_MMSE, ReceiverKind.WFQ)
)

PRESETS = {
    "fig1a": {
        "k": 2,
        "n": 16,
        "mod": "qpsk",
        "snr_db_grid": _FIG_SNR_GRID,
        "kinds": _ALL_KINDS,
    },
    "fig1b": {
        "k": 4,
        "n": 64,
        "mod": "8psk",
        "snr_db_grid": _FIG_SNR_GRID,
        "kinds": _ALL_KINDS,
    },
    "fig2": {
        "user_counts": _FIG2_USER_COUNTS,
        "mod": "qpsk",
        "snr_db_grid": (30.0,),
        "kinds": _FIG2_KINDS,
    },
}

_DEFAULTS = {
    "receivers": "all",
    "seed": 1,
    "max_trials": 100_000,
    "min_bit_errors": 200,
    "unquantized": False,
    "workers": 1,
    "format": "csv",
    "snr_step": 5.0,
}


@dataclass(frozen=True)
class RunSpec:
    """A validated run: either an SNR sweep or (fig2) an error-floor sweep."""

    preset: str | None
    users: int | None
    antennas: int | None
    modulation: str
    snr_db_grid: tuple[float, ...]
    user_counts: tuple[int, ...] | None
    kinds: tuple[ReceiverKind, ...]
    seed: int
    max_trials: int
    min_bit_errors: int
    quantized: bool
    workers: int
    out_format: str
    out_path: str


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="simulate",
        description="Monte Carlo BER simulation of linear receivers for "
        "uplink massive MIMO with one-bit ADCs.",
    )
    parser.add_argument("--preset", choices=sorted(PRESETS), default=None)
    parser.add_argument("--config", metavar="FILE", default=None,
                        help="flat key=value file mirroring the flags")
    parser.add_argument("--k", type=int, default=None, help="number of users")
    parser.add_argument("--n", type=int, default=None, help="number of antennas")
    parser.add_argument("--mod", choices=("qpsk", "8psk", "16qam"), default=None)
    parser.add_argument("--snr-start", type=float, default=None, metavar="DB")
    parser.add_argument("--snr-stop", type=float, default=None, metavar="DB")
    parser.add_argument("--snr-step", type=float, default=None, metavar="DB")
    parser.add_argument("--receivers", default=None,
                        help="comma-separated receiver names, or 'all'")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--max-trials", type=int, default=None)
    parser.add_argument("--min-bit-errors", type=int, default=None,
                        help="early-stop error target per point (0 disables)")
    parser.add_argument("--unquantized", action="store_true", default=None,
                        help="bypass the one-bit quantizer (baseline mode)")
    parser.add_argument("--workers", type=int, default=None)
    parser.add_argument("--format", choices=("csv", "json"), default=None)
    parser.add_argument("--out", default=None, metavar="PATH")
    return parser


_BOOL_TOKENS = {"true": True, "1": True, "yes": True,
                "false": False, "0": False, "no": False}

_FILE_PARSERS = {
    "preset": str,
    "k": int,
    "n": int,
    "mod": str,
    "snr-start": float,
    "snr-stop": float,
    "snr-step": float,
    "receivers": str,
    "seed": int,
    "max-trials": int,
    "min-bit-errors": int,
    "unquantized": lambda s: _BOOL_TOKENS[s.lower()],
    "workers": int,
    "format": str,
    "out": str,
}


def _read_config_file(path) -> dict:
    values = {}
    try:
        with open(path) as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"--config: {path}:{lineno}: expected key=value")
        key, _, text = line.partition("=")
        key, text = key.strip(), text.strip()
        if key not in _FILE_PARSERS:
            raise UsageError(f"--config: {path}:{lineno}: unknown key {key!r}")
        try:
            values[key.replace("-", "_")] = _FILE_PARSERS[key](text)
        except (ValueError, KeyError) as exc:
            raise UsageError(
                f"--config: {path}:{lineno}: bad value for {key}: {text!r}"
            ) from exc
    return values


def _parse_kinds(text: str) -> tuple[ReceiverKind, ...]:
    if text.strip().lower() == "all":
        return _ALL_KINDS
    kinds = []
    for token in text.split(","):
        token = token.strip().lower()
        try:
            kind = ReceiverKind(token)
        except ValueError:
            names = ", ".join(k.value for k in ReceiverKind)
            raise UsageError(
                f"--receivers: unknown receiver {token!r} (choose from {names}, all)"
            ) from None
        if kind not in kinds:
            kinds.append(kind)
    if not kinds:
        raise UsageError("--receivers: empty receiver list")
    return tuple(kinds)


def _snr_grid(start, stop, step) -> tuple[float, ...]:
    if start is None:
        raise UsageError("--snr-start is required without a preset SNR grid")
    if stop is None:
        stop = start
    if step <= 0:
        raise UsageError(f"--snr-step must be > 0, got {step}")
    if stop < start:
        raise UsageError(f"--snr-stop {stop} is below --snr-start {start}")
    count = int((stop - start) / step + 1e-9) + 1
    return tuple(start + i * step for i in range(count))


def _merged(name, cli_values, file_values, preset, fallback=None):
    for source in (cli_values, file_values):
        if source.get(name) is not None:
            return source[name]
    if preset is not None and name in preset:
        return preset[name]
    return _DEFAULTS.get(name, fallback)


def parse_run_spec(argv=None) -> RunSpec:
    """Parse flags (and the optional config file) into a validated RunSpec."""
    args = _build_parser().parse_args(argv)
    cli_values = vars(args)
    file_values = _read_config_file(args.config) if args.config else {}

    preset_name = cli_values.get("preset") or file_values.get("preset")
    preset = PRESETS.get(preset_name) if preset_name else None
    if preset_name and preset is None:
        raise UsageError(f"--preset: unknown preset {preset_name!r}")

    def value(name, fallback=None):
        return _merged(name, cli_values, file_values, preset, fallback)

    floor_mode = preset_name == "fig2"
    if floor_mode:
        for flag in ("k", "n", "mod", "snr_start", "snr_stop", "snr_step"):
            if cli_values.get(flag) is not None or file_values.get(flag) is not None:
                raise UsageError(
                    f"--{flag.replace('_', '-')}: fixed by the fig2 preset"
                )
        if value("unquantized"):
            raise UsageError("--unquantized: error floors require the quantizer")

    users = value("k")
    antennas = value("n")
    modulation = value("mod")
    if floor_mode:
        snr_db_grid = preset["snr_db_grid"]
    elif preset is not None and all(
        source.get(f) is None
        for source in (cli_values, file_values)
        for f in ("snr_start", "snr_stop", "snr_step")
    ):
        snr_db_grid = preset["snr_db_grid"]
    else:
        snr_db_grid = _snr_grid(value("snr_start"), value("snr_stop"), value("snr_step"))

    if not floor_mode:
        if users is None or antennas is None or modulation is None:
            raise UsageError(
                "--k, --n and --mod are required when no preset supplies them"
            )
        if users < 1:
            raise UsageError(f"--k: must be >= 1, got {users}")
        if antennas < users:
            raise UsageError(
                f"--n: antennas must be >= users (N >= K), got --k {users} --n {antennas}"
            )

    explicit_receivers = cli_values.get("receivers") or file_values.get("receivers")
    if explicit_receivers is not None:
        kinds = _parse_kinds(explicit_receivers)
    elif preset is not None:
        kinds = preset["kinds"]
    else:
        kinds = _ALL_KINDS

    seed = value("seed")
    if seed < 0 or seed >= 2**64:
        raise UsageError(f"--seed: must be an unsigned 64-bit integer, got {seed}")
    max_trials = value("max_trials")
    if max_trials < 1:
        raise UsageError(f"--max-trials: must be >= 1, got {max_trials}")
    min_bit_errors = value("min_bit_errors")
    if min_bit_errors < 0:
        raise UsageError(f"--min-bit-errors: must be >= 0, got {min_bit_errors}")
    workers = value("workers")
    if workers < 1:
        raise UsageError(f"--workers: must be >= 1, got {workers}")
    out_format = value("format")
    out_path = value("out") or f"results.{out_format}"

    return RunSpec(
        preset=preset_name,
        users=users,
        antennas=antennas,
        modulation=modulation,
        snr_db_grid=tuple(snr_db_grid),
        user_counts=preset["user_counts"] if floor_mode else None,
        kinds=kinds,
        seed=seed,
        max_trials=max_trials,
        min_bit_errors=min_bit_errors,
        quantized=not value("unquantized"),
        workers=workers,
        out_format=out_format,
        out_path=out_path,
    )


def run_spec(spec: RunSpec):
    """Execute a RunSpec and return its records."""
    if spec.user_counts is not None:
        return error_floor_sweep(
            spec.user_counts,
            spec.kinds,
            seed=spec.seed,
            max_trials=spec.max_trials,
            min_bit_errors=spec.min_bit_errors,
            workers=spec.workers,
        )
    config = SystemConfig(
        users=spec.users,
        antennas=spec.antennas,
        noise_power=noise_power_from_snr_db(spec.snr_db_grid[0]),
        modulation=spec.modulation,
    )
    plan = TrialPlan(
        config=config,
        kinds=spec.kinds,
        snr_db_grid=spec.snr_db_grid,
        max_trials=spec.max_trials,
        min_bit_errors=spec.min_bit_errors,
        seed=spec.seed,
        quantized=spec.quantized,
    )
    return ber_sweep(plan, workers=spec.workers)


def main(argv=None) -> int:
    try:
        spec = parse_run_spec(argv)
    except UsageError as exc:
        print(f"simulate: error: {exc}", file=sys.stderr)
        return 2
    try:
        records = run_spec(spec)
        emit_results(records, spec.out_format, spec.out_path, seed=spec.seed)
    except (OneBitMimoError, OSError, ValueError) as exc:
        print(f"simulate: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {len(records)} records to {spec.out_path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
