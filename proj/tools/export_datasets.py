#!/usr/bin/env python3
"""Regenerate the bundled CSVs in data/ from scikit-learn's offline copies."""
import pathlib

from sklearn.datasets import load_breast_cancer, load_iris

OUT = pathlib.Path(__file__).resolve().parent.parent / "data"


def fmt(v):
    return repr(float(v))


def export_iris():
    d = load_iris()
    names = [n.replace(" (cm)", "").replace(" ", "_") for n in d.feature_names]
    lines = [",".join(names + ["class"])]
    for row, target in zip(d.data, d.target):
        lines.append(",".join(f"{v:.1f}" for v in row) + "," + d.target_names[target])
    (OUT / "iris.csv").write_text("\n".join(lines) + "\n")


def export_breast_cancer():
    d = load_breast_cancer()
    names = [n.replace(" ", "_") for n in d.feature_names]
    lines = [",".join(names + ["class"])]
    for row, target in zip(d.data, d.target):
        lines.append(",".join(fmt(v) for v in row) + "," + d.target_names[target])
    (OUT / "breast-cancer.csv").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    OUT.mkdir(exist_ok=True)
    export_iris()
    export_breast_cancer()
    print("wrote", OUT / "iris.csv")
    print("wrote", OUT / "breast-cancer.csv")
