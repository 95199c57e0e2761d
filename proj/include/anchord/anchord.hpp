#pragma once

// Umbrella header.

#include "anchord/baselines.hpp"
#include "anchord/benchmark.hpp"
#include "anchord/depth_map.hpp"
#include "anchord/errors.hpp"
#include "anchord/factor_graph.hpp"
#include "anchord/io.hpp"
#include "anchord/metrics.hpp"
#include "anchord/patch_grid.hpp"
#include "anchord/pipeline.hpp"
#include "anchord/rng.hpp"
#include "anchord/robust.hpp"
#include "anchord/smoothing.hpp"
#include "anchord/solver.hpp"
#include "anchord/synthetic.hpp"
