// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "perspectf/error.hpp"
#include "perspectf/gabor.hpp"
#include "perspectf/grid.hpp"
#include "perspectf/metrics.hpp"
#include "perspectf/penalties.hpp"
#include "perspectf/perspective.hpp"
#include "perspectf/signal_io.hpp"
#include "perspectf/solver.hpp"
