import pandas
import numpy
from sklearn.ensemble import IsolationForest
import yaml
