from gchains.sim.rng import RngStream, UniformBlocks
from gchains.sim.replicas import chunk_ranges, run_chunks
from gchains.sim.chain import (
    Trajectory,
    default_burn_in,
    sample_chain,
    sample_chains,
    sample_stationary_past,
    sample_stationary_pasts,
    write_trajectories,
)
