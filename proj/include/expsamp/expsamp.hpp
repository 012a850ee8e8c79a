#pragma once

#include "analysis.hpp"
#include "core.hpp"
#include "errors.hpp"
#include "io.hpp"
#include "kernels.hpp"
#include "operators.hpp"
#include "quadrature.hpp"
#include "spaces.hpp"
