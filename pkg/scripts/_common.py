import argparse
import csv
import dataclasses
import sys


def parse_config(cls, description):
    """Build an argparse CLI from the fields of a config dataclass."""
    p = argparse.ArgumentParser(description=description)
    for f in dataclasses.fields(cls):
        flag = "--" + f.name.replace("_", "-")
        if f.type in (bool, "bool"):
            p.add_argument(flag, action="store_true")
        else:
            kind = {"int": int, "float": float, "str": str}.get(f.type, f.type)
            p.add_argument(flag, type=kind, default=f.default)
    return cls(**vars(p.parse_args()))


def write_rows(header, rows, out=None):
    fh = open(out, "w", newline="") if out else sys.stdout
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if out:
        fh.close()
