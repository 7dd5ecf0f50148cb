#pragma once

#include "w3r/types.hpp"
#include "w3r/rng.hpp"
#include "w3r/trust_network.hpp"
#include "w3r/serialization.hpp"
#include "w3r/snapshot.hpp"
#include "w3r/walk_engine.hpp"
#include "w3r/scoring.hpp"
#include "w3r/pipeline.hpp"
#include "w3r/bootstrap_cf.hpp"
#include "w3r/gossip.hpp"
#include "w3r/metrics.hpp"
#include "w3r/sybil.hpp"
#include "w3r/synth.hpp"
#include "w3r/experiments.hpp"
