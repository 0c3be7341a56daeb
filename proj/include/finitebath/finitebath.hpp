// finitebath.hpp: Everything except output.hpp (which needs libcrypto)

#pragma once

#include "finitebath/config.hpp"
#include "finitebath/errors.hpp"
#include "finitebath/ham.hpp"
#include "finitebath/metrics.hpp"
#include "finitebath/model.hpp"
#include "finitebath/observables.hpp"
#include "finitebath/ode.hpp"
#include "finitebath/propagator.hpp"
#include "finitebath/random.hpp"
#include "finitebath/scenarios.hpp"
#include "finitebath/state.hpp"
#include "finitebath/version.hpp"
