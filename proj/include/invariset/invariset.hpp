#pragma once

// Umbrella header: probabilistic identification of almost-invariant sets of
// black-box discrete-time systems from simulated trajectories.
//
//   core.hpp        states, boxes, distances, float round-trip formatting
//   rng.hpp         counter-based splittable random numbers
//   dynamics.hpp    system interface, built-in examples, simulation
//   parallel.hpp    deterministic parallel-for
//   subprocess.hpp  external systems spoken to over a pipe protocol
//   sampling.hpp    uniform sampling and sample-size / confidence formulas
//   horizon.hpp     Phase I — invariance-horizon estimation
//   nn.hpp          exact nearest-neighbor indexes (kd-tree, brute force)
//   identify.hpp    Phase II — labeling, classifiers, iterative refinement
//   oracle.hpp      white-box grid and Monte-Carlo verification
//   io.hpp          CSV/JSON artifact formats

#include "core.hpp"
#include "rng.hpp"
#include "dynamics.hpp"
#include "parallel.hpp"
#include "subprocess.hpp"
#include "sampling.hpp"
#include "horizon.hpp"
#include "nn.hpp"
#include "identify.hpp"
#include "oracle.hpp"
#include "io.hpp"
