#pragma once

#include "numeric.hpp"
#include "lp.hpp"
#include "polyhedron.hpp"
#include "thermo_core.hpp"
#include "gibbs_maps.hpp"
#include "tensor_polytope.hpp"
#include "ltocc_sim.hpp"
#include "reachability.hpp"
#include "bell_chsh.hpp"
#include "io.hpp"
