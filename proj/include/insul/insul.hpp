#pragma once

#include "insul/common.hpp"
#include "insul/geometry.hpp"
#include "insul/mesh.hpp"
#include "insul/grid.hpp"
#include "insul/rough.hpp"
#include "insul/fem.hpp"
#include "insul/eigs.hpp"
#include "insul/energy.hpp"
#include "insul/eps_solver.hpp"
#include "insul/shape_derivative.hpp"
#include "insul/flow.hpp"
#include "insul/io.hpp"
