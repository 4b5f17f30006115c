import os
import numpy as np
from PIL import Image


def load(path):
    return np.asarray(Image.open(os.path.join(path)))
