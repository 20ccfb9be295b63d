#pragma once

#include "msqg/lattice.hpp"
#include "msqg/params.hpp"
#include "msqg/field.hpp"
#include "msqg/coefficients.hpp"
#include "msqg/nonlinearity.hpp"
#include "msqg/fast_nonlinearity.hpp"
#include "msqg/gibbs.hpp"
#include "msqg/snapshot.hpp"
#include "msqg/flow.hpp"
#include "msqg/summation.hpp"
#include "msqg/statistics.hpp"
#include "msqg/parallel.hpp"
#include "msqg/expectation.hpp"
#include "msqg/invariance.hpp"
#include "msqg/io.hpp"
