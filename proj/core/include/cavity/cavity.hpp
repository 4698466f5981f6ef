#pragma once

#include "cavity/analytic.hpp"
#include "cavity/ensembles.hpp"
#include "cavity/exact.hpp"
#include "cavity/measure.hpp"
#include "cavity/network.hpp"
#include "cavity/numeric.hpp"
#include "cavity/rde.hpp"
#include "cavity/rng.hpp"
#include "cavity/solver.hpp"
#include "cavity/version.hpp"
