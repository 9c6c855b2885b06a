#pragma once

#include "wsbm/core.hpp"
#include "wsbm/rng.hpp"
#include "wsbm/simulate.hpp"
#include "wsbm/moments.hpp"
#include "wsbm/jointdiag.hpp"
#include "wsbm/estimate.hpp"
#include "wsbm/harness.hpp"
#include "wsbm/io.hpp"
#include "wsbm/config.hpp"
#include "wsbm/report.hpp"
