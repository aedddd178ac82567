#pragma once

// Umbrella header.

#include "slidefield/common.hpp"
#include "slidefield/random.hpp"
#include "slidefield/geometry.hpp"
#include "slidefield/fields.hpp"
#include "slidefield/sliding_laws.hpp"
#include "slidefield/audit.hpp"
#include "slidefield/integrator.hpp"
#include "slidefield/scenario.hpp"
#include "slidefield/trajectory_io.hpp"
