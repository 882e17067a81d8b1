#pragma once

#include "lmm/consistency.hpp"
#include "lmm/error.hpp"
#include "lmm/integrator.hpp"
#include "lmm/method.hpp"
#include "lmm/norms.hpp"
#include "lmm/operators.hpp"
#include "lmm/roots.hpp"
#include "lmm/start.hpp"
#include "lmm/witness.hpp"
