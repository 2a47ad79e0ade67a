#pragma once

#include "manetsim/adversary.hpp"
#include "manetsim/aodv.hpp"
#include "manetsim/engine.hpp"
#include "manetsim/ids.hpp"
#include "manetsim/metrics.hpp"
#include "manetsim/mobility.hpp"
#include "manetsim/packet.hpp"
#include "manetsim/rng.hpp"
#include "manetsim/scenario.hpp"
#include "manetsim/sim_time.hpp"
#include "manetsim/simulation.hpp"
#include "manetsim/trace.hpp"
