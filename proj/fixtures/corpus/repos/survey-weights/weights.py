import pandas
import requests
