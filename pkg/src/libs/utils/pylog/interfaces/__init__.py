from .enum import LogLevel
from .typing import *
