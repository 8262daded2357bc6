#pragma once

// Umbrella header for the hardy library.

#include "hardy/error.hpp"
#include "hardy/poly.hpp"
#include "hardy/rational.hpp"
#include "hardy/symbol_json.hpp"
#include "hardy/quadrature.hpp"
#include "hardy/boundedness.hpp"
#include "hardy/hardy_numerics.hpp"
#include "hardy/ac_measures.hpp"
#include "hardy/adjoint.hpp"
#include "hardy/transfer.hpp"
#include "hardy/parallel.hpp"
