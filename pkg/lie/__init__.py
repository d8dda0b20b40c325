from .rootdata import (RootSystem, RootSystemError, Root, Coroot, Weight, Coweight, build_root_system,
                       langlands_dual, pair, is_dominant_integral, harish_chandra_equal)
from .chevalley import (LieBasis, LieElement, LoopElement, UnipotentGauge, LieStructureError, build_lie_basis,
                        exp_ad, gauge_by_exponent, gauge_transform, gauge_by_cocharacter)
