#pragma once

#include "maxdist/covmodel.hpp"
#include "maxdist/diagnostics.hpp"
#include "maxdist/errors.hpp"
#include "maxdist/extremestat.hpp"
#include "maxdist/harness.hpp"
#include "maxdist/inference.hpp"
#include "maxdist/innovations.hpp"
#include "maxdist/matrix.hpp"
#include "maxdist/rng.hpp"
#include "maxdist/sampling.hpp"
#include "maxdist/toeplitz.hpp"
