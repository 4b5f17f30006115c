from transformers import AutoTokenizer
import numpy
import requests
