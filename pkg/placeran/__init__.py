__version__ = "0.1.0"

from placeran.domain import *
from placeran.errors import *
from placeran.pathgen import *
from placeran.program import *
from placeran.scenario import *
from placeran.solve import *
