from src.config.settings import *
