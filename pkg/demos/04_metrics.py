"""Confusion matrices and classification reports."""
import numpy as np

from roadsense.evaluation import ConfusionMatrix, confusion, render_text, report

labels = ("gravel_damaged", "pavement", "asphalt_damaged", "asphalt", "gravel")
# gravel and damaged gravel are the hard pair
counts = np.array([
    [54, 0, 0, 0, 6],
    [0, 60, 0, 0, 0],
    [0, 0, 57, 3, 0],
    [0, 0, 4, 56, 0],
    [6, 0, 0, 0, 54],
])
rep = report(ConfusionMatrix(counts, labels))
print(render_text(rep))
print("weighted recall == accuracy:", rep.weighted_avg.recall, rep.accuracy)

# from raw label vectors
rng = np.random.default_rng(0)
true = rng.integers(0, 3, 50)
pred = np.where(rng.random(50) < 0.8, true, rng.integers(0, 3, 50))
cm = confusion(true, pred, 3, ("a", "b", "c"))
print(cm.counts)
print(report(cm).to_json())

# a class that is never predicted gets precision 0 and a warning
print(report(ConfusionMatrix(np.array([[5, 0], [3, 0]]), ("x", "y"))).warnings)
