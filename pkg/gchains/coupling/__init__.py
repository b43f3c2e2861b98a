from gchains.coupling.greedy import (
    CoupledTrajectory,
    couple_chains,
    couple_replicas,
    coupling_time_tail,
    greedy_couple,
    greedy_couple_step,
)
