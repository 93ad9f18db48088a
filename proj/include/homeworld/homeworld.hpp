#pragma once

#include "homeworld/agent.hpp"
#include "homeworld/bundled_data.hpp"
#include "homeworld/core.hpp"
#include "homeworld/goal.hpp"
#include "homeworld/harness.hpp"
#include "homeworld/instruction.hpp"
#include "homeworld/lexicon.hpp"
#include "homeworld/navigation.hpp"
#include "homeworld/planning.hpp"
#include "homeworld/registry.hpp"
#include "homeworld/replan.hpp"
#include "homeworld/scene_io.hpp"
#include "homeworld/semantic_map.hpp"
#include "homeworld/similarity.hpp"
#include "homeworld/validator.hpp"
#include "homeworld/world.hpp"
