"""Plots the CSV tables written by `navier-bie --out DIR`.

usage: python plot_results.py DIR
"""
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main(root: Path) -> None:
    for csv in sorted(root.rglob("convergence.csv")) + sorted(root.rglob("solve.csv")):
        df = pd.read_csv(csv)
        fig, ax = plt.subplots()
        for (geom, kind, omega), g in df.groupby(["geometry", "kind", "omega"]):
            ax.loglog(g["N"], g["farfield_error"], "o-", label=f"{geom} {kind} ω={omega:g}")
        ax.set_xlabel("N")
        ax.set_ylabel("max far-field error")
        ax.legend()
        fig.savefig(csv.with_suffix(".png"), dpi=150)
    for csv in sorted(root.rglob("eigenvalues_*.csv")):
        df = pd.read_csv(csv)
        fig, ax = plt.subplots()
        ax.plot(df["re"], df["im"], ".", ms=2)
        ax.set_xlabel("Re λ")
        ax.set_ylabel("Im λ")
        ax.set_title(csv.stem)
        fig.savefig(csv.with_suffix(".png"), dpi=150)
    for csv in sorted(root.rglob("condition.csv")):
        df = pd.read_csv(csv)
        fig, ax = plt.subplots()
        for (geom, omega), g in df.groupby(["geometry", "omega"]):
            ax.loglog(g["N"], g["cond_regularized"], "o-", label=f"{geom} ω={omega:g}, R")
            ax.loglog(g["N"], g["cond_unregularized"], "s--", label=f"{geom} ω={omega:g}, R=I")
        ax.set_xlabel("N")
        ax.set_ylabel("condition number")
        ax.legend()
        fig.savefig(csv.with_suffix(".png"), dpi=150)


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "results"))
