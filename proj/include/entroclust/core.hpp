#pragma once

// Umbrella header: event-log ingestion, DFG construction, entropic
// relevance, clustering, evaluation statistics, and artifact IO.

#include "entroclust/clustering.hpp"
#include "entroclust/csv.hpp"
#include "entroclust/dfg.hpp"
#include "entroclust/errors.hpp"
#include "entroclust/evaluation.hpp"
#include "entroclust/event_log.hpp"
#include "entroclust/json_io.hpp"
#include "entroclust/parallel.hpp"
#include "entroclust/relevance.hpp"
#include "entroclust/rng.hpp"
#include "entroclust/timeparse.hpp"
#include "entroclust/xes.hpp"
