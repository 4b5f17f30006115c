import numpy
import pandas
import xgboost
from sklearn.metrics import roc_auc_score
