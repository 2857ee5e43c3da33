#pragma once

#include "orthlyap/calculus.hpp"
#include "orthlyap/decomp.hpp"
#include "orthlyap/error.hpp"
#include "orthlyap/expr.hpp"
#include "orthlyap/field.hpp"
#include "orthlyap/grid.hpp"
#include "orthlyap/io.hpp"
#include "orthlyap/linalg.hpp"
#include "orthlyap/lyapunov.hpp"
#include "orthlyap/quadrature.hpp"
#include "orthlyap/riccati.hpp"
#include "orthlyap/schur.hpp"
#include "orthlyap/sim.hpp"
#include "orthlyap/stability.hpp"
#include "orthlyap/sylvester.hpp"
#include "orthlyap/version.hpp"
