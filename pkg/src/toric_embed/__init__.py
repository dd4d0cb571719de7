from .utils import *
from .model import *
from .polyhedral import *
from .inclusion import *
from .embedding import *
from .dynamics import *
from .regions import *
from .document import *

__version__ = "1.0"
