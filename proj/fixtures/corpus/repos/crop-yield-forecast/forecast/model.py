import json
import pandas as pd
import xgboost as xgb
from sklearn.model_selection import train_test_split
