
from .tests.plugins import *
