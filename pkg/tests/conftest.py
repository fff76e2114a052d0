import os

import hypothesis
import numpy as np

np.seterr(all="raise", under="ignore")

hypothesis.settings.register_profile(
    "fast", max_examples=25, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fast"))
