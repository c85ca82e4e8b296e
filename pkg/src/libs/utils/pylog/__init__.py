from .interfaces import *
from .logger import Logger, getLogger, configure, root
