#pragma once

#include "jfw/data.hpp"
#include "jfw/errors.hpp"
#include "jfw/experiment.hpp"
#include "jfw/linalg.hpp"
#include "jfw/objectives.hpp"
#include "jfw/oracles.hpp"
#include "jfw/polynomials.hpp"
#include "jfw/solvers.hpp"
