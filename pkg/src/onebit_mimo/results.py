"""CSV/JSON emission and parsing of BER records."""

import csv
import json
import subprocess
from datetime import datetime, timezone
from pathlib import Path

from .montecarlo import BerRecord
from .receivers import ReceiverKind

CSV_HEADER = ("snr_db", "receiver", "k", "n", "modulation", "trials", "bits", "bit_errors", "ber")


def _format_snr(value: float) -> str:
    return f"{value:g}"


def _format_ber(value: float) -> str:
    # Six significant digits, exponent without zero padding: 3.00000e-4.
    mantissa, exponent = f"{value:.5e}".split("e")
    return f"{mantissa}e{int(exponent)}"


def _sorted(records):
    return sorted(
        records, key=lambda r: (r.kind.value, r.snr_db, r.users, r.antennas)
    )


def _git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
    except (OSError, subprocess.TimeoutExpired):
        return "unknown"
    return out.stdout.strip() if out.returncode == 0 else "unknown"


def _record_row(record: BerRecord) -> dict:
    return {
        "snr_db": record.snr_db,
        "receiver": record.kind.value,
        "k": record.users,
        "n": record.antennas,
        "modulation": record.modulation,
        "trials": record.trials,
        "bits": record.bits,
        "bit_errors": record.bit_errors,
        "ber": record.ber,
    }


def emit_results(records, out_format: str, path, seed=None) -> None:
    """Write records to ``path``, sorted by (receiver, snr_db).

    CSV output is byte-deterministic for identical records. JSON carries a
    top-level ``meta`` object (seed, git describe, timestamp); the timestamp
    is excluded from any determinism guarantee.
    """
    records = list(records)
    if not records:
        raise ValueError("refusing to emit an empty record list")
    records = _sorted(records)
    path = Path(path)
    if out_format == "csv":
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(CSV_HEADER)
            for record in records:
                writer.writerow(
                    [
                        _format_snr(record.snr_db),
                        record.kind.value,
                        record.users,
                        record.antennas,
                        record.modulation,
                        record.trials,
                        record.bits,
                        record.bit_errors,
                        _format_ber(record.ber),
                    ]
                )
    elif out_format == "json":
        payload = {
            "meta": {
                "seed": seed,
                "git_describe": _git_describe(),
                "timestamp": datetime.now(timezone.utc).isoformat(),
            },
            "records": [_record_row(record) for record in records],
        }
        with open(path, "w") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
    else:
        raise ValueError(f"unknown output format {out_format!r}")


def read_records(path) -> list[BerRecord]:
    """Parse a CSV written by :func:`emit_results` back into records."""
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header in {path}")
        return [
            BerRecord(
                snr_db=float(row["snr_db"]),
                kind=ReceiverKind(row["receiver"]),
                users=int(row["k"]),
                antennas=int(row["n"]),
                modulation=row["modulation"],
                trials=int(row["trials"]),
                bits=int(row["bits"]),
                bit_errors=int(row["bit_errors"]),
            )
            for row in reader
        ]
