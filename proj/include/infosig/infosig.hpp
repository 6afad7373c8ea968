#pragma once

// Umbrella header: the full signature-monitoring toolkit.

#include "infosig/errors.hpp"
#include "infosig/symbolize.hpp"
#include "infosig/counts.hpp"
#include "infosig/metrics.hpp"
#include "infosig/monitor.hpp"
#include "infosig/random.hpp"
#include "infosig/records.hpp"
#include "infosig/sim.hpp"
#include "infosig/log_io.hpp"
#include "infosig/cli.hpp"
