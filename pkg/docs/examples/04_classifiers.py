"""The seven classifiers behind one train/predict interface.

Every model is built from a ClassifierSpec. ``train`` fits a z-score scaler
on exactly the rows it is given and keeps it with the model, so prediction
on new data needs nothing else. Models round-trip through a single .npz file.

Run:  python3 docs/examples/04_classifiers.py
"""

import tempfile
import time
from pathlib import Path

import numpy as np

from creakml.ml import ClassifierKind, ClassifierSpec, load_model, predict, save_model, train

rng = np.random.default_rng(1)
# two classes that differ in a few of 40 dimensions, scaled very differently
n, d = 240, 40
y = rng.integers(0, 2, n)
x = rng.standard_normal((n, d))
x[:, :3] += 1.5 * y[:, None]
x *= rng.uniform(0.01, 100, d)
train_rows, test_rows = np.arange(180), np.arange(180, n)

for kind in ClassifierKind:
    spec = ClassifierSpec.default(kind, seed=0)
    t0 = time.perf_counter()
    model = train(spec, x[train_rows], y[train_rows], row_ids=train_rows)
    pred = np.array([int(p) for p in predict(model, x[test_rows])])
    print(f"{kind.label:16s} accuracy {np.mean(pred == y[test_rows]):.3f}  ({time.perf_counter() - t0:.2f} s)")

# hyperparameters live in the spec
deep = train(ClassifierSpec("dt", {"max_depth": 2}), x[train_rows], y[train_rows])
print("\ndepth-2 tree test accuracy:",
      np.mean(np.array([int(p) for p in predict(deep, x[test_rows])]) == y[test_rows]).round(3))

path = save_model(model, Path(tempfile.mkdtemp()) / "tree.npz")
again = load_model(path)
print(f"reloaded {again.spec.kind.label} agrees:", [int(p) for p in predict(again, x[test_rows])] ==
      [int(p) for p in predict(model, x[test_rows])])
print("scaler was fitted on rows", again.scaler.source_rows[:3], "...", again.scaler.source_rows[-1])
