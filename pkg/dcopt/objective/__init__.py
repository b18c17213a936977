from . import smooth
from .smooth import *

from . import regularizers
from .regularizers import *

from . import problem
from .problem import *

from . import data
from .data import *
