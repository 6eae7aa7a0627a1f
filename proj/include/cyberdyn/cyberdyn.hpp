#pragma once

#include "cyberdyn/analysis.hpp"
#include "cyberdyn/integrator.hpp"
#include "cyberdyn/linalg.hpp"
#include "cyberdyn/mean_structure.hpp"
#include "cyberdyn/model.hpp"
#include "cyberdyn/parallel.hpp"
#include "cyberdyn/param_process.hpp"
#include "cyberdyn/presets.hpp"
#include "cyberdyn/rng.hpp"
#include "cyberdyn/scc.hpp"
#include "cyberdyn/spectral.hpp"
#include "cyberdyn/svg.hpp"
#include "cyberdyn/temporal_graph.hpp"
