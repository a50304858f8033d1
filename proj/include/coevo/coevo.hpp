// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "coevo/checks.hpp"
#include "coevo/coupling.hpp"
#include "coevo/density.hpp"
#include "coevo/environment.hpp"
#include "coevo/growth.hpp"
#include "coevo/histogram.hpp"
#include "coevo/integrate.hpp"
#include "coevo/io.hpp"
#include "coevo/params.hpp"
#include "coevo/quadrature.hpp"
#include "coevo/rng.hpp"
#include "coevo/scenarios.hpp"
#include "coevo/theta.hpp"
#include "coevo/trajectory.hpp"
#include "coevo/verify.hpp"
#include "coevo/version.hpp"
