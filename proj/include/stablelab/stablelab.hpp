#pragma once

#include "stablelab/attracted.hpp"
#include "stablelab/classical.hpp"
#include "stablelab/config.hpp"
#include "stablelab/csv.hpp"
#include "stablelab/differences.hpp"
#include "stablelab/errors.hpp"
#include "stablelab/experiment.hpp"
#include "stablelab/generator.hpp"
#include "stablelab/grid.hpp"
#include "stablelab/hypothesis.hpp"
#include "stablelab/kernel.hpp"
#include "stablelab/pide.hpp"
#include "stablelab/psi.hpp"
#include "stablelab/quadrature.hpp"
#include "stablelab/regularity.hpp"
#include "stablelab/sublinear.hpp"
