#pragma once

#include "gold/agent.hpp"
#include "gold/common.hpp"
#include "gold/config.hpp"
#include "gold/delay.hpp"
#include "gold/game.hpp"
#include "gold/geometry.hpp"
#include "gold/harness.hpp"
#include "gold/metrics.hpp"
#include "gold/reward_pool.hpp"
#include "gold/spsa.hpp"
#include "gold/trace.hpp"
