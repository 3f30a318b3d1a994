#pragma once

#include "heartbeat/bandpass.hpp"
#include "heartbeat/error.hpp"
#include "heartbeat/metrics.hpp"
#include "heartbeat/rls.hpp"
#include "heartbeat/signal_core.hpp"
#include "heartbeat/spectrum.hpp"
#include "heartbeat/tracker.hpp"

#include "heartbeat/harness/config.hpp"
#include "heartbeat/harness/io.hpp"
#include "heartbeat/harness/pipeline.hpp"
#include "heartbeat/harness/report.hpp"
#include "heartbeat/harness/synth.hpp"
