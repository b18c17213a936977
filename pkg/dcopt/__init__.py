__version__ = '0.1.0'

from .utils import *

from . import utils

from . import exceptions
from .exceptions import *

from . import topology
from .topology import *

from . import consensus
from .consensus import *

from . import objective
from .objective import *

from . import solver
from .solver import *

from . import harness
from .harness import *

from .test_utils import *
from . import test_utils

from . import context
from .context import *
