// Copyright (c) 2026 polarmix contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "polarmix/analysis.hpp"
#include "polarmix/cheb.hpp"
#include "polarmix/codec.hpp"
#include "polarmix/discrete.hpp"
#include "polarmix/distribution.hpp"
#include "polarmix/freezing.hpp"
#include "polarmix/joint.hpp"
#include "polarmix/parallel.hpp"
#include "polarmix/polarization.hpp"
#include "polarmix/quadrature.hpp"
#include "polarmix/rng.hpp"
#include "polarmix/simulator.hpp"
