#pragma once

#include "minicage/agents.hpp"
#include "minicage/batch.hpp"
#include "minicage/bench.hpp"
#include "minicage/compiled_scenario.hpp"
#include "minicage/default_scenario.hpp"
#include "minicage/engine.hpp"
#include "minicage/env.hpp"
#include "minicage/rng.hpp"
#include "minicage/scenario.hpp"
#include "minicage/scenario_io.hpp"
#include "minicage/spaces.hpp"
#include "minicage/stats.hpp"
#include "minicage/trace.hpp"
