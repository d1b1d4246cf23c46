# # Occupancy classifier end to end
#
# Generate a small labelled set of maps, fit standardized PCA and a
# one-vs-one RBF SVM with cross-validated (C, gamma), then score the held-out 20%.
# Pass a per-class count as the first argument. The default of 20 is quick but
# noticeably weaker; 50 per class reaches about 97% and takes about a minute.

import sys
import tempfile
import time

from occupancy_radar import evaluate_bundle, generate, train

per_class = int(sys.argv[1]) if len(sys.argv) > 1 else 20

t0 = time.perf_counter()
manifest = generate(per_class=per_class, seed=7, out_dir=tempfile.mkdtemp())
print(f"{len(manifest.items)} maps of shape {manifest.map_shape} in {time.perf_counter() - t0:.0f} s")

bundle = train(manifest, seed=7)
print(f"PCA kept {bundle.pca.n_components} components")
print(f"best C = {bundle.svm.C}, gamma = {bundle.svm.kernel.gamma:.2e}, CV accuracy = {bundle.cv_score:.3f}")

cm = evaluate_bundle(bundle, manifest)
print(cm.to_text())
print(f"total time {time.perf_counter() - t0:.0f} s")
