from gchains.kernels.alphabet import Alphabet
from gchains.kernels.past import Past
from gchains.kernels.base import (
    EXACT,
    LOWER_BOUND,
    UPPER_BOUND,
    ChainState,
    Estimate,
    Kernel,
    SearchBudget,
)
from gchains.kernels.series import (
    CONVERGENT,
    DIVERGENT,
    INCONCLUSIVE,
    SeriesClassification,
    classify_growth,
    classify_series,
)
from gchains.kernels.criteria import (
    dobrushin_sum,
    ell2_criterion,
    oscillation,
    oscillation_sup,
    variation_profile,
    variation_rate,
)
