import os
import sys
import json
import pandas
