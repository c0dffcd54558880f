#pragma once

#include "medbounds/closed_bounds.hpp"
#include "medbounds/coupling.hpp"
#include "medbounds/double_description.hpp"
#include "medbounds/errors.hpp"
#include "medbounds/experiments.hpp"
#include "medbounds/inference.hpp"
#include "medbounds/linear_expr.hpp"
#include "medbounds/observed.hpp"
#include "medbounds/polytope_lp.hpp"
#include "medbounds/rational.hpp"
#include "medbounds/reference_bounds.hpp"
#include "medbounds/response_types.hpp"
#include "medbounds/rng.hpp"
#include "medbounds/scm.hpp"
#include "medbounds/simplex.hpp"
#include "medbounds/types.hpp"
