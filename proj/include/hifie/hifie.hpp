#pragma once

// Umbrella header: approximate generalized LU factorizations of dense kernel
// matrices by recursive skeletonization and hierarchical interpolative
// factorization, with fast apply/solve, operator-error estimators, and a
// preconditioned GMRES driver.

#include "hifie/block_factor.hpp"
#include "hifie/clusters.hpp"
#include "hifie/compression.hpp"
#include "hifie/config.hpp"
#include "hifie/dense.hpp"
#include "hifie/errors.hpp"
#include "hifie/estimators.hpp"
#include "hifie/factor.hpp"
#include "hifie/fft.hpp"
#include "hifie/gmres.hpp"
#include "hifie/grid.hpp"
#include "hifie/id.hpp"
#include "hifie/kernels.hpp"
#include "hifie/operators.hpp"
#include "hifie/problem.hpp"
#include "hifie/report.hpp"
#include "hifie/runner.hpp"
#include "hifie/sci.hpp"
#include "hifie/serialize.hpp"
#include "hifie/version.hpp"
