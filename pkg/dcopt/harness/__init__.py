from . import config
from .config import *

from . import experiment
from .experiment import *

from . import cli
from .cli import *
