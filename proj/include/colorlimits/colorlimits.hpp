#pragma once

#include "colorlimits/ball.hpp"
#include "colorlimits/diagnostics.hpp"
#include "colorlimits/errors.hpp"
#include "colorlimits/feature.hpp"
#include "colorlimits/graph_io.hpp"
#include "colorlimits/learnability.hpp"
#include "colorlimits/limits.hpp"
#include "colorlimits/mp.hpp"
#include "colorlimits/multigraph.hpp"
#include "colorlimits/parallel.hpp"
#include "colorlimits/params.hpp"
#include "colorlimits/pmf.hpp"
#include "colorlimits/refine.hpp"
#include "colorlimits/registry.hpp"
#include "colorlimits/rng.hpp"
#include "colorlimits/samplers.hpp"
#include "colorlimits/tree.hpp"
