import os
import torch
import numpy as np
from PIL import Image
from lesions.data import load

model = torch.nn.Linear(4, 2)
