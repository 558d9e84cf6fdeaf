#pragma once

#include "fhe/error.hpp"
#include "fhe/format.hpp"
#include "fhe/grid.hpp"
#include "fhe/quadrature.hpp"
#include "fhe/hardy_constant.hpp"
#include "fhe/expression.hpp"
#include "fhe/weights.hpp"
#include "fhe/parallel.hpp"
#include "fhe/nonlocal_form.hpp"
#include "fhe/eigensolver.hpp"
#include "fhe/config.hpp"
#include "fhe/cli.hpp"
