#pragma once

#include "coinroute/actions.hpp"
#include "coinroute/defaults.hpp"
#include "coinroute/engine.hpp"
#include "coinroute/harness.hpp"
#include "coinroute/learner.hpp"
#include "coinroute/ledger.hpp"
#include "coinroute/policies.hpp"
#include "coinroute/stats.hpp"
#include "coinroute/topology.hpp"
#include "coinroute/wlu.hpp"
