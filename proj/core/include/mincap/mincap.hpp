#pragma once

#include "mincap/capacity.hpp"
#include "mincap/classifier.hpp"
#include "mincap/error.hpp"
#include "mincap/estimates.hpp"
#include "mincap/examples.hpp"
#include "mincap/expression.hpp"
#include "mincap/mesh.hpp"
#include "mincap/mesh_solver.hpp"
#include "mincap/quadrature.hpp"
#include "mincap/radial_solver.hpp"
#include "mincap/serialize.hpp"
#include "mincap/warp.hpp"
#include "mincap/warped_manifold.hpp"
