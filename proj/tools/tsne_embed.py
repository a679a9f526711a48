# Copyright 2026 The SACC Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""2-D t-SNE of a CSV feature matrix: tsne_embed.py IN OUT SEED."""

import sys

import numpy as np
from sklearn.manifold import TSNE


def main(argv):
    src, dst, seed = argv[1], argv[2], int(argv[3])
    x = np.loadtxt(src, delimiter=",", ndmin=2)
    perplexity = min(30.0, max(2.0, (len(x) - 1) / 3.0))
    coords = TSNE(n_components=2, perplexity=perplexity, init="pca",
                  random_state=seed).fit_transform(x)
    np.savetxt(dst, coords, delimiter=",", fmt="%.9g")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
