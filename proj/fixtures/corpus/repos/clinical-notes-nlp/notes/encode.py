from transformers import AutoModel
import torch
import requests
