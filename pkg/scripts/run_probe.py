#!/usr/bin/env python3
"""Two-point determinant at and near the kernel's critical radius."""
import argparse

from kansa_tps.experiments import probe_csv, singular_probe
from kansa_tps.kernel import TpsKernel


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--nu", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--csv", action="store_true", help="print CSV instead of a table")
    args = ap.parse_args()
    for nu in args.nu:
        report = singular_probe(TpsKernel(nu))
        if args.csv:
            print(probe_csv(report), end="")
            continue
        print(f"nu={nu}  critical radius={report['critical_radius']:.12f}")
        for case, rows in report["cases"].items():
            for r in rows:
                print(f"  {case:13s} delta={r['delta']:<8g} det={r['det']: .6e}  closed form={r['closed_form']: .6e}")


if __name__ == "__main__":
    main()
