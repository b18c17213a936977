from . import schedule
from .schedule import *

from . import state
from .state import *

from . import odapg
from .odapg import *

from . import baseline
from .baseline import *

from . import reference
from .reference import *

from . import bounds
from .bounds import *

from . import runner
from .runner import *
