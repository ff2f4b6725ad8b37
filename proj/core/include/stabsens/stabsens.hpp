#pragma once

// Umbrella header.

#include "stabsens/bench.hpp"
#include "stabsens/errors.hpp"
#include "stabsens/finite_diff.hpp"
#include "stabsens/io.hpp"
#include "stabsens/rng.hpp"
#include "stabsens/sensitivity.hpp"
#include "stabsens/stability_sdp.hpp"
#include "stabsens/symmetric.hpp"
#include "stabsens/system_model.hpp"
