"""Train the micro-CNN on synthetic camera textures (a few minutes on one core)."""
import numpy as np

from roadsense.dataset import stratified_split, synth_image
from roadsense.evaluation import confusion, render_text, report
from roadsense.neural import RoadClass, TrainConfig, build_preset, forward, train

per_class, size = 60, 32
entries = [{"road_class": rc.name, "seed": [0, int(rc), i]} for rc in RoadClass for i in range(per_class)]
entries = stratified_split(entries, seed=0)


def arrays(split):
    chosen = [e for e in entries if e["split"] == split]
    x = np.stack([synth_image(e["road_class"], size, e["seed"])[0] for e in chosen]).astype(np.float32)
    y = np.array([RoadClass[e["road_class"]] for e in chosen])
    return x, y


train_set, val_set, test_set = arrays("train"), arrays("val"), arrays("test")
print("train", train_set[0].shape, "val", val_set[0].shape, "test", test_set[0].shape)

spec = build_preset("mini-alexnet", (size, size, 1))
for layer, shape in zip(spec.layers, spec.shapes()[1:]):
    print(f"{layer.kind:<8} -> {shape}")

# a larger step than the default 1e-4 keeps this demo short
cfg = TrainConfig(learning_rate=1e-3, batch_size=16, max_epochs=15, patience=10)
model = train(spec, train_set, val_set, cfg)
for h in model.meta["history"]:
    print(f"epoch {h['epoch']:3d}  train {h['train_loss']:.4f}  val {h['val_loss']:.4f}")
print("best epoch", model.meta["best_epoch"])

pred = forward(model, test_set[0]).argmax(axis=1)
cm = confusion(test_set[1], pred, 5, RoadClass.names())
print(cm.counts)
print(render_text(report(cm)))
