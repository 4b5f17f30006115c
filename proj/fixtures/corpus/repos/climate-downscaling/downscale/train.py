import torch
import numpy
import matplotlib.pyplot
