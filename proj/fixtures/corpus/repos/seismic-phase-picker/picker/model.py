import torch
import numpy
import matplotlib.pyplot as plt
from . import utils
from picker import utils as u
