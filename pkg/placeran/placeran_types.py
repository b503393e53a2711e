from typing import Literal, Union

# Node and link identifiers are strings inside a Topology; files may use integers
NodeId = str
LinkId = str

# Physical units
Bps = float
Seconds = float
Cores = float

# Alias for the disaggregated RAN functions, Low PHY (f1) up to RRC (f8)
VnfId = Literal["f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8"]

# Alias for the transport sub-paths between core, CU, DU and RU
SubpathKey = Literal["bh", "mh", "fh"]

# Alias for values accepted where a number is read from a file or the environment
Number = Union[int, float]
