#pragma once

// Umbrella header for the whole library.

#include "jddsim/alist.hpp"
#include "jddsim/baselines.hpp"
#include "jddsim/code_gen.hpp"
#include "jddsim/encoder.hpp"
#include "jddsim/harness.hpp"
#include "jddsim/joint_decoder.hpp"
#include "jddsim/messages.hpp"
#include "jddsim/modem.hpp"
#include "jddsim/oracle.hpp"
#include "jddsim/parity_check.hpp"
#include "jddsim/results.hpp"
#include "jddsim/rng.hpp"
#include "jddsim/spa.hpp"
#include "jddsim/version.hpp"
