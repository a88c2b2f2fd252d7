// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "mra/baselines.hpp"
#include "mra/benchmark.hpp"
#include "mra/core.hpp"
#include "mra/fft.hpp"
#include "mra/invariants.hpp"
#include "mra/io.hpp"
#include "mra/matrix.hpp"
#include "mra/parallel.hpp"
#include "mra/reconstruct.hpp"
#include "mra/rng.hpp"
#include "mra/signal.hpp"
#include "mra/simulate.hpp"
#include "mra/spectral.hpp"
